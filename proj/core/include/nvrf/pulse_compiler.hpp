#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace nvrf {

enum class Envelope
{
  cosine_square,
  rectangular
};

struct PulseSpec
{
  double center_time = 0; ///< s, not snapped to the sample grid
  double duration = 0;    ///< s, full envelope support
  double phase = 0;       ///< rad, 0 = +X, pi/2 = +Y
  double target_angle = std::numbers::pi;
  Envelope envelope = Envelope::cosine_square;

  double start() const { return center_time - 0.5 * duration; }
  double end() const { return center_time + 0.5 * duration; }
};

struct SequenceSpec
{
  std::vector<PulseSpec> pulses;
  double total_time = 0; ///< end of the last pulse support
  double tau = 0;        ///< pi-pulse period (0 when not applicable)
  int n_reps = 0;
  double readout_phase = 0;

  /// Sensing window: first to last pulse center.
  double window_start() const;
  double window_end() const;
  double sensing_time() const { return window_end() - window_start(); }
  std::size_t pi_pulse_count() const;
};

/// Checks ordering, support overlap and non-negative start. Throws
/// InfeasibleSequence naming the offending pulse.
void validate_sequence(SequenceSpec const &seq);

struct BuildOptions
{
  Envelope envelope = Envelope::cosine_square;
  double readout_phase = 0;
};

/// Initial pi/2 (X), 8 n_reps pi pulses X Y X Y Y X Y X at period tau starting
/// tau/2 after the pi/2 center, final pi/2 at 8 n_reps tau. t = 0 is the
/// leading edge of the first pi/2 support. pi/2 pulses reuse the pi-pulse peak
/// amplitude with half the support.
SequenceSpec build_xy8(int n_reps, double tau, double t_pi, BuildOptions const &opt = {});

/// pi/2 - tau_half - theta - tau_half - pi/2. The center pulse keeps the
/// pi-pulse support; its area scales with theta.
SequenceSpec build_hahn(double tau_half, double center_angle, double t_pi, BuildOptions const &opt = {});

/// Single rectangular-drive pulse of the given length at rabi_hz.
SequenceSpec build_rabi(double pulse_length, double rabi_hz, Envelope envelope = Envelope::rectangular);

/// Peak Rabi frequency (Hz) that rotates by target_angle over the support.
double required_peak_rabi(PulseSpec const &p);

/// Integral of the unit-peak envelope over its support, s.
double envelope_area(Envelope e, double duration);

struct WaveformIQ
{
  double sample_rate = 1e9;
  double full_scale_rabi = 100e6;
  std::vector<std::int16_t> i_samples;
  std::vector<std::int16_t> q_samples;
  /// Sensing window carried over from the sequence, s.
  double window_start = 0;
  double window_end = 0;

  std::size_t size() const { return i_samples.size(); }
  double dt() const { return 1.0 / sample_rate; }
  /// Rabi components of sample k in Hz.
  double rabi_i(std::size_t k) const;
  double rabi_q(std::size_t k) const;
};

inline constexpr std::int16_t full_scale_code = 32767;

/// Renders cos^2 or rectangular envelopes, box-integrated over each sample
/// interval [k/fs, (k+1)/fs), rotated into (I,Q) by the pulse phase and
/// quantized round-to-nearest with saturation. Throws RenderError when a
/// pulse's peak exceeds full scale.
WaveformIQ render_waveform(SequenceSpec const &seq, double sample_rate = 1e9, double full_scale_rabi = 100e6);

/// Moves one pulse center by delta; re-validates the sequence.
SequenceSpec shift_pulse_center(SequenceSpec const &seq, std::size_t pulse_index, double delta);

/// Ideal-pulse sign function: +1 from the window start, flipping at every pi
/// pulse center, until the window end.
class ModulationFunction
{
public:
  ModulationFunction(double start, double end, std::vector<double> flips);

  double start() const { return start_; }
  double end() const { return end_; }
  std::span<double const> flips() const { return flips_; }
  double value(double t) const;
  /// Closed-form integral of y over the window.
  double integral() const;

  /// Segment boundaries start, flips..., end. Segment j has sign (-1)^j.
  std::vector<double> boundaries() const;

private:
  double start_;
  double end_;
  std::vector<double> flips_;
};

/// Throws UnsupportedSequence when an interior pulse is not a pi pulse.
ModulationFunction modulation_function(SequenceSpec const &seq);

/// Occupied bandwidth (Hz) holding 99% of the I+jQ energy.
double bandwidth_estimate(WaveformIQ const &wf);

} // namespace nvrf
