#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace nvrf::oracle {

namespace {
constexpr double pi = std::numbers::pi;

std::vector<double> centers_of_pi_pulses(SequenceSpec const &seq)
{
  std::vector<double> c;
  for (std::size_t k = 1; k + 1 < seq.pulses.size(); ++k) { c.push_back(seq.pulses[k].center_time); }
  return c;
}
} // namespace

FieldXZ filament(double x, double d, double current, double mu0)
{
  // Current along +y at the origin; point at (x, 0, d). B = mu0 I/(2 pi r^2) (y x r).
  double const r2 = x * x + d * d;
  double const k = mu0 * current / (2.0 * pi * r2);
  return {k * d, -k * x};
}

FieldXZ filament_strip(double x, double d, double width, double current, double mu0, int n)
{
  if (n % 2) { ++n; }
  double const h = width / n;
  FieldXZ acc;
  for (int k = 0; k <= n; ++k) {
    double const w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    double const xs = -0.5 * width + k * h;
    auto const f = filament(x - xs, d, 1.0, mu0);
    acc.bx += w * f.bx;
    acc.bz += w * f.bz;
  }
  double const scale = current / width * h / 3.0;
  return {acc.bx * scale, acc.bz * scale};
}

double centroid(WaveformIQ const &wf, double t_lo, double t_hi)
{
  double num = 0;
  double den = 0;
  for (std::size_t k = 0; k < wf.size(); ++k) {
    double const t = (static_cast<double>(k) + 0.5) / wf.sample_rate;
    if (t < t_lo || t >= t_hi) { continue; }
    double const a = std::hypot(static_cast<double>(wf.i_samples[k]), static_cast<double>(wf.q_samples[k]));
    num += a * t;
    den += a;
  }
  return den > 0 ? num / den : 0.0;
}

double rotation_area(WaveformIQ const &wf, double t_lo, double t_hi)
{
  double acc = 0;
  for (std::size_t k = 0; k < wf.size(); ++k) {
    double const t = (static_cast<double>(k) + 0.5) / wf.sample_rate;
    if (t < t_lo || t >= t_hi) { continue; }
    acc += std::hypot(static_cast<double>(wf.i_samples[k]), static_cast<double>(wf.q_samples[k]));
  }
  return 2.0 * pi * acc * wf.full_scale_rabi / 32767.0 / wf.sample_rate;
}

double simpson_cos2_area(double duration, int panels)
{
  if (panels % 2) { ++panels; }
  double const h = duration / panels;
  double acc = 0;
  for (int k = 0; k <= panels; ++k) {
    double const t = -0.5 * duration + k * h;
    double const c = std::cos(pi * t / duration);
    double const w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * c * c;
  }
  return acc * h / 3.0;
}

double gauss_phase(SequenceSpec const &seq, double amplitude, double frequency, double phi0, double gamma_e)
{
  static constexpr double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                  0.9061798459386640};
  static constexpr double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                  0.2369268850561891, 0.2369268850561891};
  double const t0 = seq.pulses.front().center_time;
  double const t1 = seq.pulses.back().center_time;
  std::vector<double> edges{t0};
  for (double c : centers_of_pi_pulses(seq)) { edges.push_back(c); }
  edges.push_back(t1);

  double acc = 0;
  double sign = 1.0;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    // split each segment into sub-panels for high accuracy
    int const sub = 16;
    double const a = edges[s];
    double const h = (edges[s + 1] - a) / sub;
    for (int j = 0; j < sub; ++j) {
      double const m = a + (j + 0.5) * h;
      for (int q = 0; q < 5; ++q) {
        double const t = m + 0.5 * h * x[q];
        acc += sign * w[q] * 0.5 * h * amplitude * std::cos(2.0 * pi * frequency * (t - t0) + phi0);
      }
    }
    sign = -sign;
  }
  return 2.0 * pi * gamma_e * acc;
}

double brute_filter(SequenceSpec const &seq, double f, int samples_per_segment)
{
  double const t0 = seq.pulses.front().center_time;
  double const t1 = seq.pulses.back().center_time;
  std::vector<double> edges{t0};
  for (double c : centers_of_pi_pulses(seq)) { edges.push_back(c); }
  edges.push_back(t1);
  std::complex<double> acc = 0;
  double sign = 1.0;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    double const h = (edges[s + 1] - edges[s]) / samples_per_segment;
    for (int j = 0; j < samples_per_segment; ++j) {
      double const t = edges[s] + (j + 0.5) * h - t0;
      acc += sign * h * std::polar(1.0, -2.0 * pi * f * t);
    }
    sign = -sign;
  }
  double const norm = 2.0 / pi * (t1 - t0);
  return std::norm(acc) / (norm * norm);
}

double lorentzian_pair(double f, double c1, double w1, double c2, double w2, double depth)
{
  auto dip = [](double f, double c, double w) {
    double const u = 2.0 * (f - c) / w;
    return 1.0 / (1.0 + u * u);
  };
  return 1.0 - depth * (dip(f, c1, w1) + dip(f, c2, w2));
}

} // namespace nvrf::oracle
