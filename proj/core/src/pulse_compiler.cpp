#include "nvrf/pulse_compiler.hpp"

#include "nvrf/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <string>

namespace nvrf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double overlap_slack = 1e-15; // s

bool is_pi(double angle) { return std::abs(angle - pi) < 1e-9; }

// Antiderivative of the unit-peak envelope in u = t - center, clipped to the
// support.
double envelope_primitive(Envelope e, double duration, double u)
{
  double const half = 0.5 * duration;
  u = std::clamp(u, -half, half);
  switch (e) {
  case Envelope::cosine_square:
    return 0.5 * u + duration / (4.0 * pi) * std::sin(2.0 * pi * u / duration);
  case Envelope::rectangular:
    return u;
  }
  return 0;
}

std::int16_t saturate(double r)
{
  if (r > 32767.0) { return 32767; }
  if (r < -32768.0) { return -32768; }
  return static_cast<std::int16_t>(r);
}

// Round-to-nearest per sample, then move the rounding of the samples with the
// largest residuals so that each contiguous non-zero run keeps its rounded
// total. This bounds the area error of a pulse by half a code-sample.
std::vector<std::int16_t> quantize(std::vector<double> const &acc)
{
  std::vector<std::int16_t> out(acc.size(), 0);
  std::size_t k = 0;
  std::vector<std::size_t> order;
  while (k < acc.size()) {
    if (acc[k] == 0.0) {
      ++k;
      continue;
    }
    std::size_t const begin = k;
    while (k < acc.size() && acc[k] != 0.0) {
      ++k;
    }
    double exact = 0;
    double rounded = 0;
    std::vector<double> r(k - begin);
    for (std::size_t j = begin; j < k; ++j) {
      r[j - begin] = std::round(acc[j]);
      exact += acc[j];
      rounded += r[j - begin];
    }
    auto diff = static_cast<long>(std::round(exact) - rounded);
    order.resize(k - begin);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // residual acc - r in (-0.5, 0.5]; raise the most under-rounded first
    double const dir = diff > 0 ? 1.0 : -1.0;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dir * (acc[begin + a] - r[a]) > dir * (acc[begin + b] - r[b]);
    });
    for (std::size_t j = 0; diff != 0 && j < order.size(); ++j) {
      r[order[j]] += dir;
      diff -= static_cast<long>(dir);
    }
    for (std::size_t j = begin; j < k; ++j) {
      out[j] = saturate(r[j - begin]);
    }
  }
  return out;
}

} // namespace

double SequenceSpec::window_start() const { return pulses.empty() ? 0.0 : pulses.front().center_time; }
double SequenceSpec::window_end() const { return pulses.empty() ? 0.0 : pulses.back().center_time; }

std::size_t SequenceSpec::pi_pulse_count() const
{
  if (pulses.size() < 3) { return 0; }
  return static_cast<std::size_t>(
    std::count_if(pulses.begin() + 1, pulses.end() - 1, [](PulseSpec const &p) { return is_pi(p.target_angle); }));
}

void validate_sequence(SequenceSpec const &seq)
{
  for (std::size_t i = 0; i < seq.pulses.size(); ++i) {
    auto const &p = seq.pulses[i];
    if (!(p.duration > 0)) { throw InfeasibleSequence("pulse " + std::to_string(i) + " has non-positive duration"); }
    if (!(p.target_angle >= 0 && p.target_angle <= 2.0 * pi + 1e-12)) {
      throw InfeasibleSequence("pulse " + std::to_string(i) + " target angle outside [0, 2pi]");
    }
    if (p.start() < -overlap_slack) {
      throw InfeasibleSequence("pulse " + std::to_string(i) + " starts before t = 0");
    }
    if (i > 0) {
      auto const &prev = seq.pulses[i - 1];
      if (p.center_time <= prev.center_time) {
        throw InfeasibleSequence("pulse " + std::to_string(i) + " is out of order");
      }
      if (prev.end() > p.start() + overlap_slack) {
        throw InfeasibleSequence("pulses " + std::to_string(i - 1) + " and " + std::to_string(i) + " overlap");
      }
    }
  }
}

namespace {

PulseSpec make_pulse(double center, double duration, double phase, double angle, Envelope e)
{
  return PulseSpec{center, duration, phase, angle, e};
}

void finish(SequenceSpec &seq)
{
  seq.total_time = 0;
  for (auto const &p : seq.pulses) {
    seq.total_time = std::max(seq.total_time, p.end());
  }
  validate_sequence(seq);
}

} // namespace

SequenceSpec build_xy8(int n_reps, double tau, double t_pi, BuildOptions const &opt)
{
  if (n_reps < 1) { throw DomainError("XY8 needs n_reps >= 1"); }
  if (!(t_pi > 0)) { throw DomainError("pi length must be positive"); }
  if (!(tau > t_pi)) { throw InfeasibleSequence("tau must exceed the pi length"); }

  static constexpr std::array<double, 8> pattern{0, pi / 2, 0, pi / 2, pi / 2, 0, pi / 2, 0};

  SequenceSpec seq;
  seq.tau = tau;
  seq.n_reps = n_reps;
  seq.readout_phase = opt.readout_phase;

  double const half_len = 0.5 * t_pi;
  double const c0 = 0.5 * half_len;
  int const n_pi = 8 * n_reps;
  seq.pulses.reserve(static_cast<std::size_t>(n_pi) + 2);
  seq.pulses.push_back(make_pulse(c0, half_len, 0.0, pi / 2, opt.envelope));
  for (int k = 0; k < n_pi; ++k) {
    seq.pulses.push_back(make_pulse(c0 + 0.5 * tau + k * tau, t_pi, pattern[k % 8], pi, opt.envelope));
  }
  // XY8 nets an identity rotation, so -X returns the state to |0> at zero phase.
  seq.pulses.push_back(make_pulse(c0 + n_pi * tau, half_len, opt.readout_phase + pi, pi / 2, opt.envelope));
  finish(seq);
  return seq;
}

SequenceSpec build_hahn(double tau_half, double center_angle, double t_pi, BuildOptions const &opt)
{
  if (!(t_pi > 0)) { throw DomainError("pi length must be positive"); }
  if (!(tau_half > t_pi)) { throw InfeasibleSequence("Hahn delay must exceed the pi length"); }
  if (!(center_angle >= 0 && center_angle <= 2 * pi)) { throw DomainError("center angle outside [0, 2pi]"); }

  SequenceSpec seq;
  seq.tau = 2.0 * tau_half;
  seq.n_reps = 0;
  seq.readout_phase = opt.readout_phase;
  double const half_len = 0.5 * t_pi;
  double const c0 = 0.5 * half_len;
  seq.pulses.push_back(make_pulse(c0, half_len, 0.0, pi / 2, opt.envelope));
  seq.pulses.push_back(make_pulse(c0 + tau_half, t_pi, 0.0, center_angle, opt.envelope));
  seq.pulses.push_back(make_pulse(c0 + 2.0 * tau_half, half_len, opt.readout_phase, pi / 2, opt.envelope));
  finish(seq);
  return seq;
}

SequenceSpec build_rabi(double pulse_length, double rabi_hz, Envelope envelope)
{
  if (!(pulse_length > 0)) { throw DomainError("pulse length must be positive"); }
  if (!(rabi_hz > 0)) { throw DomainError("Rabi frequency must be positive"); }
  double const angle = 2.0 * pi * rabi_hz * envelope_area(envelope, pulse_length);
  SequenceSpec seq;
  seq.pulses.push_back(make_pulse(0.5 * pulse_length, pulse_length, 0.0, angle, envelope));
  finish(seq);
  return seq;
}

double envelope_area(Envelope e, double duration)
{
  return e == Envelope::cosine_square ? 0.5 * duration : duration;
}

double required_peak_rabi(PulseSpec const &p)
{
  return p.target_angle / (2.0 * pi) / envelope_area(p.envelope, p.duration);
}

double WaveformIQ::rabi_i(std::size_t k) const { return i_samples[k] * full_scale_rabi / full_scale_code; }
double WaveformIQ::rabi_q(std::size_t k) const { return q_samples[k] * full_scale_rabi / full_scale_code; }

WaveformIQ render_waveform(SequenceSpec const &seq, double sample_rate, double full_scale_rabi)
{
  if (!(sample_rate > 0) || !(full_scale_rabi > 0)) { throw DomainError("sample rate and full scale must be positive"); }
  validate_sequence(seq);

  double const dt = 1.0 / sample_rate;
  auto const n = static_cast<std::size_t>(std::ceil(seq.total_time * sample_rate - 1e-9));
  std::vector<double> acc_i(n, 0.0);
  std::vector<double> acc_q(n, 0.0);

  for (std::size_t ip = 0; ip < seq.pulses.size(); ++ip) {
    auto const &p = seq.pulses[ip];
    double const peak = required_peak_rabi(p);
    if (peak > full_scale_rabi * (1.0 + 1e-12)) {
      throw RenderError("pulse " + std::to_string(ip) + " needs peak Rabi " + std::to_string(peak) +
                          " Hz above full scale " + std::to_string(full_scale_rabi) + " Hz",
                        ip);
    }
    if (peak == 0) { continue; }
    double const code = peak / full_scale_rabi * full_scale_code;
    double const ci = code * std::cos(p.phase);
    double const cq = code * std::sin(p.phase);

    auto const k0 = static_cast<std::size_t>(std::max(0.0, std::floor(p.start() * sample_rate)));
    auto const k1 = std::min(n, static_cast<std::size_t>(std::ceil(p.end() * sample_rate)) + 1);
    for (std::size_t k = k0; k < k1; ++k) {
      double const a = envelope_primitive(p.envelope, p.duration, k * dt - p.center_time);
      double const b = envelope_primitive(p.envelope, p.duration, (k + 1) * dt - p.center_time);
      double const frac = (b - a) / dt;
      acc_i[k] += ci * frac;
      acc_q[k] += cq * frac;
    }
  }

  WaveformIQ wf;
  wf.sample_rate = sample_rate;
  wf.full_scale_rabi = full_scale_rabi;
  wf.window_start = seq.window_start();
  wf.window_end = seq.window_end();
  wf.i_samples = quantize(acc_i);
  wf.q_samples = quantize(acc_q);
  return wf;
}

SequenceSpec shift_pulse_center(SequenceSpec const &seq, std::size_t pulse_index, double delta)
{
  if (pulse_index >= seq.pulses.size()) { throw DomainError("pulse index out of range"); }
  SequenceSpec out = seq;
  out.pulses[pulse_index].center_time += delta;
  finish(out);
  return out;
}

ModulationFunction::ModulationFunction(double start, double end, std::vector<double> flips)
  : start_(start)
  , end_(end)
  , flips_(std::move(flips))
{
}

double ModulationFunction::value(double t) const
{
  if (t < start_ || t > end_) { return 0.0; }
  auto const n = std::upper_bound(flips_.begin(), flips_.end(), t) - flips_.begin();
  return (n % 2 == 0) ? 1.0 : -1.0;
}

std::vector<double> ModulationFunction::boundaries() const
{
  std::vector<double> b;
  b.reserve(flips_.size() + 2);
  b.push_back(start_);
  b.insert(b.end(), flips_.begin(), flips_.end());
  b.push_back(end_);
  return b;
}

double ModulationFunction::integral() const
{
  auto const b = boundaries();
  double s = 0;
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    s += ((j % 2 == 0) ? 1.0 : -1.0) * (b[j + 1] - b[j]);
  }
  return s;
}

ModulationFunction modulation_function(SequenceSpec const &seq)
{
  if (seq.pulses.size() < 2) { throw UnsupportedSequence("modulation function needs bracketing pi/2 pulses"); }
  std::vector<double> flips;
  for (std::size_t i = 1; i + 1 < seq.pulses.size(); ++i) {
    if (!is_pi(seq.pulses[i].target_angle)) {
      throw UnsupportedSequence("interior pulse " + std::to_string(i) + " is not a pi pulse");
    }
    flips.push_back(seq.pulses[i].center_time);
  }
  return ModulationFunction(seq.window_start(), seq.window_end(), std::move(flips));
}

double bandwidth_estimate(WaveformIQ const &wf)
{
  std::size_t const n = wf.size();
  if (n == 0) { throw UndefinedBandwidth("empty waveform"); }
  bool const any = std::any_of(wf.i_samples.begin(), wf.i_samples.end(), [](auto v) { return v != 0; }) ||
                   std::any_of(wf.q_samples.begin(), wf.q_samples.end(), [](auto v) { return v != 0; });
  if (!any) { throw UndefinedBandwidth("all-zero waveform has no occupied bandwidth"); }

  std::size_t nfft = 4096;
  while (nfft < 16 * n) {
    nfft *= 2;
  }

  static std::mutex plan_mutex; // FFTW planning is not thread-safe
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    buf[k] = {static_cast<double>(wf.i_samples[k]), static_cast<double>(wf.q_samples[k])};
  }
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex);
    auto *data = reinterpret_cast<fftw_complex *>(buf.data());
    plan = fftw_plan_dft_1d(static_cast<int>(nfft), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(plan);
  }

  // Reorder to ascending frequency -fs/2 .. fs/2.
  std::vector<double> power(nfft);
  for (std::size_t k = 0; k < nfft; ++k) {
    power[k] = std::norm(buf[(k + nfft / 2) % nfft]);
  }
  double const total = std::accumulate(power.begin(), power.end(), 0.0);
  double cum = 0;
  std::size_t lo = 0;
  std::size_t hi = nfft - 1;
  bool have_lo = false;
  for (std::size_t k = 0; k < nfft; ++k) {
    cum += power[k];
    if (!have_lo && cum >= 0.005 * total) {
      lo = k;
      have_lo = true;
    }
    if (cum >= 0.995 * total) {
      hi = k;
      break;
    }
  }
  double const df = wf.sample_rate / static_cast<double>(nfft);
  return static_cast<double>(hi - lo + 1) * df;
}

} // namespace nvrf
