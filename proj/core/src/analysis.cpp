#include "nvrf/analysis.hpp"

#include "nvrf/errors.hpp"
#include "nvrf/levenberg_marquardt.hpp"
#include "nvrf/spin_dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace nvrf {

namespace {

constexpr double pi = std::numbers::pi;

double median(std::vector<double> v)
{
  auto const mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

FitResult failure(std::string warning)
{
  FitResult r;
  r.converged = false;
  r.warnings.push_back(std::move(warning));
  return r;
}

struct LineFit
{
  double slope = 0;
  double intercept = 0;
  bool ok = false;
};

LineFit plain_line(std::vector<double> const &x, std::vector<double> const &y)
{
  LineFit f;
  if (x.size() < 2) { return f; }
  double const n = static_cast<double>(x.size());
  double const mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double const my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) { return f; }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.ok = true;
  return f;
}

} // namespace

void SweepCurve::validate() const
{
  if (x.size() != y.size() || (!sigma.empty() && sigma.size() != x.size())) {
    throw DomainError("sweep curve arrays differ in length");
  }
  if (x.size() < 2) { return; }
  bool const up = x[1] > x[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (up ? !(x[i] > x[i - 1]) : !(x[i] < x[i - 1])) { throw DomainError("abscissa must be strictly monotone"); }
  }
}

double FitResult::value(std::string const &name) const
{
  for (auto const &p : params) {
    if (p.name == name) { return p.value; }
  }
  throw DomainError("fit has no parameter " + name);
}

double FitResult::std_error(std::string const &name) const
{
  for (auto const &p : params) {
    if (p.name == name) { return p.std_error; }
  }
  throw DomainError("fit has no parameter " + name);
}

bool FitResult::has_warning(std::string const &w) const
{
  return std::find(warnings.begin(), warnings.end(), w) != warnings.end();
}

// ---------------------------------------------------------------------------
// Lorentzian pair
// ---------------------------------------------------------------------------

FitResult fit_lorentzian_pair(SweepCurve const &spectrum)
{
  spectrum.validate();
  std::size_t const n = spectrum.size();
  if (n < 16) { throw DomainError("Lorentzian pair fit needs at least 16 points"); }
  if (spectrum.x.back() < spectrum.x.front()) { throw DomainError("spectrum abscissa must ascend"); }

  double const f_mid = 0.5 * (spectrum.x.front() + spectrum.x.back());
  double const f_scale = spectrum.x.back() - spectrum.x.front();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = (spectrum.x[i] - f_mid) / f_scale;
  }
  double const baseline = median(spectrum.y);
  double y_scale = 0;
  for (double v : spectrum.y) {
    y_scale = std::max(y_scale, std::abs(v));
  }
  if (y_scale == 0) { y_scale = 1; }

  // depth, lightly smoothed
  std::vector<double> depth(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t const a = i < 2 ? 0 : i - 2;
    std::size_t const b = std::min(n - 1, i + 2);
    double s = 0;
    for (std::size_t j = a; j <= b; ++j) {
      s += baseline - spectrum.y[j];
    }
    depth[i] = s / static_cast<double>(b - a + 1);
  }
  double const max_depth = *std::max_element(depth.begin(), depth.end());
  if (!(max_depth > 1e-9 * std::max(std::abs(baseline), 1e-300))) { return failure("no_signal"); }

  std::vector<std::size_t> minima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (depth[i] > depth[i - 1] && depth[i] >= depth[i + 1] && depth[i] > 0.05 * max_depth) { minima.push_back(i); }
  }
  std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return depth[a] > depth[b]; });
  if (minima.empty()) { return failure("no_signal"); }

  auto half_width = [&](std::size_t i) {
    double const half = 0.5 * depth[i];
    std::size_t l = i;
    while (l > 0 && depth[l] > half) {
      --l;
    }
    std::size_t r = i;
    while (r + 1 < n && depth[r] > half) {
      ++r;
    }
    return std::max(u[r] - u[l], 2.0 * (u[1] - u[0]));
  };

  std::vector<std::string> warnings;
  std::size_t const i1 = minima[0];
  double g1 = half_width(i1);
  double c1 = u[i1];
  double c2 = 0;
  double g2 = 0;
  double a2 = 0;
  if (minima.size() >= 2) {
    std::size_t const i2 = minima[1];
    c2 = u[i2];
    g2 = half_width(i2);
    a2 = depth[i2];
  } else {
    warnings.push_back("degenerate");
    g1 *= 0.5;
    c2 = c1 + 0.5 * g1;
    c1 -= 0.5 * g1;
    g2 = g1;
    a2 = 0.5 * depth[i1];
  }
  double const a1 = minima.size() >= 2 ? depth[i1] : 0.5 * depth[i1];

  double const spacing = (u.back() - u.front()) / static_cast<double>(n - 1);
  if (std::min(g1, g2) / spacing < 8.0 && minima.size() >= 2) {
    throw DomainError("spectrum sampled with fewer than 8 points per linewidth");
  }

  auto model = [&](Eigen::VectorXd const &p, Eigen::VectorXd &r, Eigen::MatrixXd &J) {
    for (std::size_t i = 0; i < n; ++i) {
      double val = p(0);
      J(static_cast<Eigen::Index>(i), 0) = 1.0;
      for (int k = 0; k < 2; ++k) {
        double const A = p(1 + 3 * k);
        double const c = p(2 + 3 * k);
        double const h = 0.5 * p(3 + 3 * k);
        double const d = u[i] - c;
        double const den = d * d + h * h;
        double const L = h * h / den;
        val -= A * L;
        auto const row = static_cast<Eigen::Index>(i);
        J(row, 1 + 3 * k) = -L;
        J(row, 2 + 3 * k) = -A * 2.0 * h * h * d / (den * den);
        J(row, 3 + 3 * k) = -A * 0.5 * (2.0 * h * d * d / (den * den));
      }
      r(static_cast<Eigen::Index>(i)) = (val - spectrum.y[i] / y_scale);
    }
  };

  Eigen::VectorXd p0(7);
  p0 << baseline / y_scale, a1 / y_scale, c1, g1, a2 / y_scale, c2, g2;
  auto const lm = levenberg_marquardt(model, p0, static_cast<int>(n));

  struct Line
  {
    double depth, depth_e, center, center_e, fwhm, fwhm_e;
  };
  std::array<Line, 2> lines{};
  for (int k = 0; k < 2; ++k) {
    lines[k] = Line{lm.params(1 + 3 * k) * y_scale,        lm.standard_errors(1 + 3 * k) * y_scale,
                    f_mid + lm.params(2 + 3 * k) * f_scale, lm.standard_errors(2 + 3 * k) * f_scale,
                    std::abs(lm.params(3 + 3 * k)) * f_scale, lm.standard_errors(3 + 3 * k) * f_scale};
  }
  if (lines[0].center > lines[1].center) { std::swap(lines[0], lines[1]); }

  FitResult out;
  out.converged = lm.converged;
  out.iterations = lm.iterations;
  out.residual_norm = lm.residual_norm * y_scale;
  out.params = {{"baseline", lm.params(0) * y_scale, lm.standard_errors(0) * y_scale},
                {"depth_1", lines[0].depth, lines[0].depth_e},
                {"center_1", lines[0].center, lines[0].center_e},
                {"fwhm_1", lines[0].fwhm, lines[0].fwhm_e},
                {"depth_2", lines[1].depth, lines[1].depth_e},
                {"center_2", lines[1].center, lines[1].center_e},
                {"fwhm_2", lines[1].fwhm, lines[1].fwhm_e}};
  out.warnings = std::move(warnings);
  bool const close = lines[1].center - lines[0].center < std::max(lines[0].fwhm, lines[1].fwhm);
  if (close && !out.has_warning("degenerate")) { out.warnings.push_back("degenerate"); }
  return out;
}

// ---------------------------------------------------------------------------
// Double exponential
// ---------------------------------------------------------------------------

FitResult fit_double_exponential(SweepCurve const &decay)
{
  if (decay.size() == 0) { throw DomainError("decay curve is empty"); }
  decay.validate();
  std::size_t const n = decay.size();
  if (n < 6) { throw DomainError("double-exponential fit needs at least 6 points"); }
  if (!(decay.y.front() > 0)) { throw DomainError("decay must start positive"); }
  if (!(decay.x.back() > decay.x.front())) { throw DomainError("decay abscissa must ascend"); }

  double const t_scale = decay.x.back();
  double y_scale = 0;
  for (double v : decay.y) {
    y_scale = std::max(y_scale, std::abs(v));
  }
  std::vector<double> t(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = decay.x[i] / t_scale;
    y[i] = decay.y[i] / y_scale;
  }

  // Peeling: slow component from the log of the later half, fast from the
  // log of what remains early on.
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = n / 2; i < n; ++i) {
    if (y[i] > 0) {
      lx.push_back(t[i]);
      ly.push_back(std::log(y[i]));
    }
  }
  auto slow = plain_line(lx, ly);
  double k_slow = slow.ok && slow.slope < 0 ? -slow.slope : 1.0 / t.back();
  double a_slow = slow.ok ? std::exp(slow.intercept) : 0.5 * y[0];
  a_slow = std::min(a_slow, 0.9 * y[0]);

  lx.clear();
  ly.clear();
  for (std::size_t i = 0; i < n / 3; ++i) {
    double const rest = y[i] - a_slow * std::exp(-k_slow * t[i]);
    if (rest > 0) {
      lx.push_back(t[i]);
      ly.push_back(std::log(rest));
    }
  }
  auto fast = plain_line(lx, ly);
  double k_fast = fast.ok && -fast.slope > 1.2 * k_slow ? -fast.slope : 3.0 * k_slow;
  double a_fast = fast.ok ? std::exp(fast.intercept) : y[0] - a_slow;
  if (!(a_fast > 0)) { a_fast = 0.1 * y[0]; }

  auto model = [&](Eigen::VectorXd const &p, Eigen::VectorXd &r, Eigen::MatrixXd &J) {
    double const tf = std::exp(p(2));
    double const ts = std::exp(p(3));
    for (std::size_t i = 0; i < n; ++i) {
      auto const row = static_cast<Eigen::Index>(i);
      double const ef = std::exp(-t[i] / tf);
      double const es = std::exp(-t[i] / ts);
      r(row) = p(0) * ef + p(1) * es - y[i];
      J(row, 0) = ef;
      J(row, 1) = es;
      J(row, 2) = p(0) * ef * t[i] / tf;
      J(row, 3) = p(1) * es * t[i] / ts;
    }
  };
  Eigen::VectorXd p0(4);
  p0 << a_fast, a_slow, std::log(1.0 / k_fast), std::log(1.0 / k_slow);
  auto const lm = levenberg_marquardt(model, p0, static_cast<int>(n));

  double a1 = lm.params(0);
  double a2 = lm.params(1);
  double tf = std::exp(lm.params(2));
  double ts = std::exp(lm.params(3));
  Eigen::Matrix4d cov = lm.covariance;
  if (tf > ts) {
    std::swap(a1, a2);
    std::swap(tf, ts);
    Eigen::Matrix4d P = Eigen::Matrix4d::Zero();
    P(0, 1) = P(1, 0) = P(2, 3) = P(3, 2) = 1;
    cov = P * cov * P;
  }
  double const amp = a1 + a2;
  double const w = a1 / amp;
  // delta method: w = a1/(a1+a2)
  Eigen::Vector4d gw(a2 / (amp * amp), -a1 / (amp * amp), 0, 0);
  Eigen::Vector4d ga(1, 1, 0, 0);
  auto safe_sqrt = [](double v) { return std::isfinite(v) ? std::sqrt(std::max(0.0, v)) : v; };

  FitResult out;
  out.converged = lm.converged;
  out.iterations = lm.iterations;
  out.residual_norm = lm.residual_norm * y_scale;
  out.params = {{"amplitude", amp * y_scale, safe_sqrt(ga.dot(cov * ga)) * y_scale},
                {"weight", w, safe_sqrt(gw.dot(cov * gw))},
                {"t_fast", tf * t_scale, tf * t_scale * safe_sqrt(cov(2, 2))},
                {"t_slow", ts * t_scale, ts * t_scale * safe_sqrt(cov(3, 3))}};
  if (w < 0.02 || w > 0.98 || ts / tf < 1.05) { out.warnings.push_back("effectively_single"); }
  if (a1 < 0 || a2 < 0) { out.warnings.push_back("negative_component"); }
  return out;
}

// ---------------------------------------------------------------------------
// Instantaneous diffusion
// ---------------------------------------------------------------------------

LinearFit weighted_linear_fit(SweepCurve const &c)
{
  c.validate();
  std::size_t const n = c.size();
  if (n < 2) { throw DomainError("linear fit needs at least 2 points"); }
  bool const weighted = !c.sigma.empty();
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double const w = weighted ? 1.0 / (c.sigma[i] * c.sigma[i]) : 1.0;
    S += w;
    Sx += w * c.x[i];
    Sy += w * c.y[i];
    Sxx += w * c.x[i] * c.x[i];
    Sxy += w * c.x[i] * c.y[i];
  }
  double const det = S * Sxx - Sx * Sx;
  if (!(det > 0)) { throw DomainError("linear fit abscissa is degenerate"); }
  LinearFit f;
  f.slope = (S * Sxy - Sx * Sy) / det;
  f.intercept = (Sxx * Sy - Sx * Sxy) / det;
  double const ybar = Sy / S;
  double ss_res = 0;
  double ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double const w = weighted ? 1.0 / (c.sigma[i] * c.sigma[i]) : 1.0;
    double const e = c.y[i] - (f.intercept + f.slope * c.x[i]);
    ss_res += w * e * e;
    ss_tot += w * (c.y[i] - ybar) * (c.y[i] - ybar);
  }
  f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  double const s2 = weighted ? 1.0 : (n > 2 ? ss_res / static_cast<double>(n - 2) : 0.0);
  f.slope_error = std::sqrt(s2 * S / det);
  return f;
}

DensityEstimate nv_density_from_id(SweepCurve const &rates, PhysConsts const &c, double id_constant)
{
  rates.validate();
  std::vector<double> xs = rates.x;
  std::sort(xs.begin(), xs.end());
  auto const distinct = std::unique(xs.begin(), xs.end()) - xs.begin();
  if (distinct < 3) { throw DomainError("density regression needs at least 3 distinct angles"); }
  if (!(id_constant > 0)) { throw DomainError("instantaneous-diffusion constant must be positive"); }

  DensityEstimate out;
  out.fit = weighted_linear_fit(rates);
  out.linear = out.fit.r_squared > linearity_r2_threshold;
  double ymax = 0;
  for (double v : rates.y) {
    ymax = std::max(ymax, std::abs(v));
  }
  if (std::abs(out.fit.slope) <= 1e-9 * ymax) {
    out.zero_slope = true;
    return out;
  }
  if (out.fit.slope < 0) { throw NonPhysicalDensity("decay rate falls with sin^2(theta/2)"); }
  double const g = c.gamma_angular();
  double const per_density = 0.25 * id_constant * g * g;
  out.ppm = volume_density_to_ppm(c, out.fit.slope / per_density);
  out.ppm_error = volume_density_to_ppm(c, out.fit.slope_error / per_density);
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

double frequency_resolution(double tau, double delta_tau)
{
  if (!(tau > 0)) { throw DomainError("tau must be positive"); }
  if (!(delta_tau >= 0)) { throw DomainError("time step must be non-negative"); }
  return delta_tau / (2.0 * tau * tau);
}

PeakEstimate find_peak_tau(SweepCurve const &sweep)
{
  sweep.validate();
  std::size_t const n = sweep.size();
  if (n < 5) { throw DomainError("peak search needs at least 5 points"); }
  auto const &y = sweep.y;
  auto const &x = sweep.x;
  // max_element keeps the first of equal maxima; minmax_element would keep the last
  auto const mn = std::min_element(y.begin(), y.end());
  auto const mx = std::max_element(y.begin(), y.end());
  std::size_t const i = static_cast<std::size_t>(mx - y.begin());
  double const tol = 1e-9 * (*mx - *mn);

  PeakEstimate out;
  for (std::size_t j = i + 2; j < n; ++j) {
    if (y[j] >= *mx - tol) { out.ambiguous = true; }
  }
  if (i == 0 || i + 1 == n) { throw BoundaryPeakError("maximum lies at the sweep boundary"); }

  auto vertex = [&](double y0, double y1, double y2) {
    double const x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
    double const d0 = (y1 - y0) / (x1 - x0);
    double const d1 = (y2 - y1) / (x2 - x1);
    double const a = (d1 - d0) / (x2 - x0);
    if (!(a < 0)) { return std::pair{x1, y1}; }
    double const b = d0 - a * (x0 + x1);
    double const xv = -b / (2.0 * a);
    double const yv = y1 + (xv - x1) * (d0 + a * (xv - x0)); // Newton form
    return std::pair{xv, yv};
  };
  auto const [xv, yv] = vertex(y[i - 1], y[i], y[i + 1]);
  out.tau = xv;
  out.amplitude = yv;
  if (!sweep.sigma.empty()) {
    double var = 0;
    std::array<double, 3> yy{y[i - 1], y[i], y[i + 1]};
    for (int k = 0; k < 3; ++k) {
      double const h = std::max(1e-6 * std::abs(yy[k]), 1e-12 * (*mx - *mn) + 1e-300);
      auto yp = yy;
      yp[k] += h;
      double const dx = (vertex(yp[0], yp[1], yp[2]).first - xv) / h;
      double const s = sweep.sigma[i - 1 + k];
      var += dx * dx * s * s;
    }
    out.uncertainty = std::sqrt(var);
  } else {
    out.uncertainty = 0.25 * (x[i + 1] - x[i - 1]);
  }
  return out;
}

RepeatStats repeat_statistics(std::vector<SweepCurve> const &traces, double at)
{
  if (traces.size() < 2) { throw DomainError("repeat statistics need at least 2 traces"); }
  auto const &ref = traces.front();
  ref.validate();
  if (ref.size() == 0) { throw DomainError("empty trace"); }
  double xmax = 0;
  for (double v : ref.x) {
    xmax = std::max(xmax, std::abs(v));
  }
  for (auto const &t : traces) {
    t.validate();
    if (t.size() != ref.size()) { throw AlignmentError("traces have different lengths"); }
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (std::abs(t.x[i] - ref.x[i]) > 1e-12 * xmax) { throw AlignmentError("traces use different abscissa grids"); }
    }
  }
  double const lo = std::min(ref.x.front(), ref.x.back());
  double const hi = std::max(ref.x.front(), ref.x.back());
  if (at < lo || at > hi) { throw DomainError("requested abscissa outside the sweep"); }
  std::size_t best = 0;
  for (std::size_t i = 1; i < ref.size(); ++i) {
    if (std::abs(ref.x[i] - at) < std::abs(ref.x[best] - at)) { best = i; }
  }
  double sum = 0;
  for (auto const &t : traces) {
    sum += t.y[best];
  }
  RepeatStats s;
  s.mean = sum / static_cast<double>(traces.size());
  double ss = 0;
  for (auto const &t : traces) {
    ss += (t.y[best] - s.mean) * (t.y[best] - s.mean);
  }
  s.sigma = std::sqrt(ss / static_cast<double>(traces.size() - 1));
  return s;
}

// ---------------------------------------------------------------------------
// Contrast <-> field
// ---------------------------------------------------------------------------

namespace {

double phase_per_tesla(SequenceSpec const &seq, NVParams const &p)
{
  std::size_t const n_pi = seq.pi_pulse_count();
  if (n_pi == 0 || !(seq.tau > 0)) { throw InversionError("sequence has no pi-pulse train to calibrate against"); }
  return resonant_phase(p.consts, 1.0, n_pi, seq.tau);
}

} // namespace

double field_to_contrast(double field, SequenceSpec const &seq, NVParams const &p)
{
  return xy8_signal(phase_per_tesla(seq, p) * field, seq, p);
}

double contrast_to_field(double delta_contrast, SequenceSpec const &seq, NVParams const &p)
{
  double const k = phase_per_tesla(seq, p);
  double const env = coherence_envelope(p, std::max(0.0, seq.sensing_time()));
  double const rho = seq.readout_phase;
  double c = std::cos(rho) - 2.0 * delta_contrast / env;
  if (std::abs(c) > 1.0 + 1e-12 || !std::isfinite(c)) {
    throw InversionError("population difference " + std::to_string(delta_contrast) + " outside invertible range");
  }
  c = std::clamp(c, -1.0, 1.0);
  double const phi = std::abs(rho) < 1e-15 ? std::acos(c) : rho - std::acos(c);
  return phi / k;
}

} // namespace nvrf
