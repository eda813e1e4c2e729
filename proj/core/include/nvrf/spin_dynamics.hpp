#pragma once

#include "physical_model.hpp"
#include "pulse_compiler.hpp"

#include <Eigen/Core>
#include <vector>

namespace nvrf {

enum class PhaseMode
{
  fixed,
  uniform_random_averaged
};

/// RF field already projected on the NV axis. The phase is referenced to the
/// sensing-window start: B(t) = amplitude cos(2 pi f (t - t0) + phase).
struct RFField
{
  double amplitude = 0; ///< T
  double frequency = 19.23e6;
  double phase = 0;
  PhaseMode phase_mode = PhaseMode::fixed;

  void validate() const;
};

using BlochState = Eigen::Vector3d;

/// Ideal-pulse accumulated phase 2 pi gamma_e int y(t) B(t) dt, integrated
/// analytically over each constant-sign segment.
double phase_closed_form(SequenceSpec const &seq, RFField const &field, PhysConsts const &c);

/// Resonant, optimally phased special case (2/pi) 2 pi gamma_e B N_p tau.
double resonant_phase(PhysConsts const &c, double amplitude, std::size_t n_pi, double tau);

struct NumericPhase
{
  double phase = 0;
  bool accuracy_warning = false; ///< step coarser than tau/50
};

/// Independent route: composite trapezoid on each constant-sign segment.
NumericPhase phase_numeric(SequenceSpec const &seq, RFField const &field, PhysConsts const &c, double step);

/// Bright-state population (1 + E cos(phi - readout_phase))/2 with E the
/// coherence envelope at the sensing time.
double xy8_population(double phi, SequenceSpec const &seq, NVParams const &p);

/// Observable p(no field) - p(field).
double xy8_signal(double phi, SequenceSpec const &seq, NVParams const &p);

/// Number of phi0 quadrature points used for PhaseMode::uniform_random_averaged.
inline constexpr int random_phase_points = 32;

/// xy8_signal for a field, averaged over phi0 when the field's phase is random.
double field_signal(SequenceSpec const &seq, RFField const &field, NVParams const &p);

/// Squared magnitude of the windowed transform of y(t), normalized by
/// ((2/pi) N_p tau)^2 so an ideal XY8 peaks near 1 at 1/(2 tau).
double filter_function(SequenceSpec const &seq, double f);

/// Numerically located filter peak and full width at half maximum.
struct FilterPeak
{
  double frequency = 0;
  double weight = 0;
  double fwhm = 0;
};
FilterPeak filter_peak(SequenceSpec const &seq);

struct PropagationOptions
{
  bool dephasing = true; ///< apply coherence_envelope to transverse components
  BlochState initial{0.0, 0.0, 1.0};
};

/// Piecewise-constant rotating-frame propagation, one rotation per sample:
/// omega = 2 pi (Omega_I, Omega_Q, detuning + gamma_e B(t)). Throws
/// ResolutionError when a sample rotates by more than 2 pi/10.
BlochState propagate_bloch(WaveformIQ const &wf, double detuning, RFField const &field, NVParams const &p,
                           PropagationOptions const &opt = {});

/// Bright population (1 + z)/2.
inline double bright_population(BlochState const &s) { return 0.5 * (1.0 + s.z()); }

/// ODMR photoluminescence normalized to 1 off resonance: two Lorentzian dips
/// at resonance_frequencies, each of depth contrast/2.
std::vector<double> simulate_odmr(NVParams const &p, double b_bias, std::vector<double> const &freq_grid,
                                  double linewidth_lower, double linewidth_upper);

/// Hahn echo amplitude versus the full pi/2-to-pi/2 delay. At center_angle =
/// pi this is coherence_envelope; other angles change each component's rate by
/// the instantaneous-diffusion difference id_rate(theta) - id_rate(pi).
std::vector<double> simulate_hahn_decay(NVParams const &p, std::vector<double> const &delays, double center_angle);

} // namespace nvrf
