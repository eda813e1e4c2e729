#include "nvrf/spin_dynamics.hpp"

#include "nvrf/errors.hpp"
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <complex>

namespace nvrf {

namespace {
constexpr double pi = std::numbers::pi;
}

void RFField::validate() const
{
  if (!(amplitude >= 0)) { throw DomainError("RF amplitude must be non-negative"); }
  if (!(frequency > 0)) { throw DomainError("RF frequency must be positive"); }
}

double phase_closed_form(SequenceSpec const &seq, RFField const &field, PhysConsts const &c)
{
  field.validate();
  auto const mf = modulation_function(seq);
  if (field.amplitude == 0) { return 0.0; }
  double const w = 2.0 * pi * field.frequency;
  double const t0 = mf.start();
  auto const b = mf.boundaries();
  double sum = 0;
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    double const seg = std::sin(w * (b[j + 1] - t0) + field.phase) - std::sin(w * (b[j] - t0) + field.phase);
    sum += (j % 2 == 0) ? seg : -seg;
  }
  return c.gamma_angular() * field.amplitude * sum / w;
}

double resonant_phase(PhysConsts const &c, double amplitude, std::size_t n_pi, double tau)
{
  return (2.0 / pi) * c.gamma_angular() * amplitude * static_cast<double>(n_pi) * tau;
}

NumericPhase phase_numeric(SequenceSpec const &seq, RFField const &field, PhysConsts const &c, double step)
{
  if (!(step > 0)) { throw DomainError("integration step must be positive"); }
  field.validate();
  auto const mf = modulation_function(seq);
  NumericPhase out;
  double const ref = seq.tau > 0 ? seq.tau : (mf.end() - mf.start());
  out.accuracy_warning = step > ref / 50.0;

  double const w = 2.0 * pi * field.frequency;
  double const t0 = mf.start();
  auto b_of = [&](double t) { return field.amplitude * std::cos(w * (t - t0) + field.phase); };
  auto const b = mf.boundaries();
  double total = 0;
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    double const len = b[j + 1] - b[j];
    if (len <= 0) { continue; }
    auto const n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / step)));
    double const h = len / static_cast<double>(n);
    double s = 0.5 * (b_of(b[j]) + b_of(b[j + 1]));
    for (std::size_t k = 1; k < n; ++k) {
      s += b_of(b[j] + static_cast<double>(k) * h);
    }
    total += ((j % 2 == 0) ? 1.0 : -1.0) * s * h;
  }
  out.phase = c.gamma_angular() * total;
  return out;
}

double xy8_population(double phi, SequenceSpec const &seq, NVParams const &p)
{
  double const env = coherence_envelope(p, std::max(0.0, seq.sensing_time()));
  return 0.5 * (1.0 + env * std::cos(phi - seq.readout_phase));
}

double xy8_signal(double phi, SequenceSpec const &seq, NVParams const &p)
{
  return xy8_population(0.0, seq, p) - xy8_population(phi, seq, p);
}

double field_signal(SequenceSpec const &seq, RFField const &field, NVParams const &p)
{
  if (field.phase_mode == PhaseMode::fixed) { return xy8_signal(phase_closed_form(seq, field, p.consts), seq, p); }
  double acc = 0;
  RFField f = field;
  for (int k = 0; k < random_phase_points; ++k) {
    f.phase = 2.0 * pi * k / random_phase_points;
    acc += std::abs(xy8_signal(phase_closed_form(seq, f, p.consts), seq, p));
  }
  return acc / random_phase_points;
}

double filter_function(SequenceSpec const &seq, double f)
{
  if (!(f > 0)) { throw DomainError("filter frequency must be positive"); }
  auto const mf = modulation_function(seq);
  double const w = 2.0 * pi * f;
  double const t0 = mf.start();
  auto const b = mf.boundaries();
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    auto const seg = std::polar(1.0, w * (b[j + 1] - t0)) - std::polar(1.0, w * (b[j] - t0));
    acc += (j % 2 == 0) ? seg : -seg;
  }
  acc /= std::complex<double>(0.0, w);
  double const norm = (2.0 / pi) * (mf.end() - mf.start());
  return std::norm(acc) / (norm * norm);
}

FilterPeak filter_peak(SequenceSpec const &seq)
{
  auto const mf = modulation_function(seq);
  double const window = mf.end() - mf.start();
  auto const n_pi = static_cast<double>(std::max<std::size_t>(1, mf.flips().size()));
  double const f0 = n_pi / (2.0 * window);
  double const span = 4.0 * f0 / n_pi;

  constexpr int scan_points = 4001;
  double const lo = std::max(f0 - span, 1e-3 * f0);
  double const df = (f0 + span - lo) / (scan_points - 1);
  double best_f = f0;
  double best_w = -1;
  for (int i = 0; i < scan_points; ++i) {
    double const f = lo + i * df;
    double const wgt = filter_function(seq, f);
    if (wgt > best_w) {
      best_w = wgt;
      best_f = f;
    }
  }
  // golden-section refinement inside one scan step
  double a = best_f - df;
  double b = best_f + df;
  double const g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    double const c1 = b - g * (b - a);
    double const c2 = a + g * (b - a);
    if (filter_function(seq, c1) > filter_function(seq, c2)) {
      b = c2;
    } else {
      a = c1;
    }
  }
  FilterPeak out;
  out.frequency = 0.5 * (a + b);
  out.weight = filter_function(seq, out.frequency);
  double const half = 0.5 * out.weight;

  auto crossing = [&](double dir) {
    double inner = out.frequency;
    double outer = out.frequency;
    double stepf = df;
    while (filter_function(seq, outer) > half) {
      inner = outer;
      outer += dir * stepf;
      if (outer <= 0) { throw DomainError("filter half maximum not bracketed"); }
    }
    for (int it = 0; it < 100; ++it) {
      double const mid = 0.5 * (inner + outer);
      if (filter_function(seq, mid) > half) {
        inner = mid;
      } else {
        outer = mid;
      }
    }
    return 0.5 * (inner + outer);
  };
  out.fwhm = crossing(+1.0) - crossing(-1.0);
  return out;
}

BlochState propagate_bloch(WaveformIQ const &wf, double detuning, RFField const &field, NVParams const &p,
                           PropagationOptions const &opt)
{
  field.validate();
  double const dt = wf.dt();
  double const gamma = p.consts.gamma_e;
  double const max_rot = 2.0 * pi / 10.0;

  double const z_max = std::abs(detuning) + gamma * field.amplitude;
  for (std::size_t k = 0; k < wf.size(); ++k) {
    double const oi = wf.rabi_i(k);
    double const oq = wf.rabi_q(k);
    double const rot = 2.0 * pi * std::sqrt(oi * oi + oq * oq + z_max * z_max) * dt;
    if (rot > max_rot) {
      throw ResolutionError("sample " + std::to_string(k) + " rotates by " + std::to_string(rot) +
                            " rad; need at least 10 samples per Rabi period");
    }
  }

  double const ws = wf.window_start;
  double const we = wf.window_end;
  double const w_rf = 2.0 * pi * field.frequency;
  auto envelope_at = [&](double t) { return coherence_envelope(p, std::clamp(t, ws, we) - ws); };

  BlochState m = opt.initial;
  double env_prev = envelope_at(0.0);
  for (std::size_t k = 0; k < wf.size(); ++k) {
    double const t0 = static_cast<double>(k) * dt;
    double const tm = t0 + 0.5 * dt;
    double const bz = field.amplitude * std::cos(w_rf * (tm - ws) + field.phase);
    Eigen::Vector3d const omega = 2.0 * pi * Eigen::Vector3d(wf.rabi_i(k), wf.rabi_q(k), detuning + gamma * bz);
    double const theta = omega.norm() * dt;
    if (theta > 0) {
      Eigen::Vector3d const u = omega / omega.norm();
      double const cs = std::cos(theta);
      double const sn = std::sin(theta);
      m = m * cs + u.cross(m) * sn + u * u.dot(m) * (1.0 - cs);
    }
    if (opt.dephasing) {
      double const env = envelope_at(t0 + dt);
      if (env_prev > 0) {
        double const f = env / env_prev;
        m.x() *= f;
        m.y() *= f;
      }
      env_prev = env;
    }
  }
  return m;
}

std::vector<double> simulate_odmr(NVParams const &p, double b_bias, std::vector<double> const &freq_grid,
                                  double linewidth_lower, double linewidth_upper)
{
  if (!std::is_sorted(freq_grid.begin(), freq_grid.end())) { throw DomainError("frequency grid must ascend"); }
  if (!(linewidth_lower > 0) || !(linewidth_upper > 0)) { throw DomainError("linewidths must be positive"); }
  auto const [f_lo, f_hi] = resonance_frequencies(p, b_bias);
  double const hl = 0.5 * linewidth_lower;
  double const hu = 0.5 * linewidth_upper;
  double const depth = 0.5 * p.contrast;
  std::vector<double> out(freq_grid.size());
  std::transform(freq_grid.begin(), freq_grid.end(), out.begin(), [&](double f) {
    double const l1 = hl * hl / ((f - f_lo) * (f - f_lo) + hl * hl);
    double const l2 = hu * hu / ((f - f_hi) * (f - f_hi) + hu * hu);
    return 1.0 - depth * (l1 + l2);
  });
  return out;
}

std::vector<double> simulate_hahn_decay(NVParams const &p, std::vector<double> const &delays, double center_angle)
{
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (!(delays[i] > 0) || (i > 0 && !(delays[i] > delays[i - 1]))) {
      throw DomainError("Hahn delays must be positive and strictly ascending");
    }
  }
  double const full = id_rate(p, pi);
  double const shift = id_rate(p, center_angle) - full;
  double const k_fast = 1.0 / p.t2_fast + shift;
  double const k_slow = 1.0 / p.t2_slow + shift;
  if (1.0 / p.t2_slow <= full) {
    throw DomainError("instantaneous-diffusion rate at theta = pi exceeds 1/t2_slow; NV density too high");
  }
  std::vector<double> out(delays.size());
  std::transform(delays.begin(), delays.end(), out.begin(), [&](double t) {
    return p.fast_weight * std::exp(-k_fast * t) + (1.0 - p.fast_weight) * std::exp(-k_slow * t);
  });
  return out;
}

} // namespace nvrf
