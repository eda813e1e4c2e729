#include "nvrf/analysis.hpp"
#include "nvrf/errors.hpp"
#include "nvrf/spin_dynamics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace nvrf;

namespace {

constexpr double pi = std::numbers::pi;

SweepCurve odmr_curve(double c1, double w1, double c2, double w2, double depth, double noise = 0,
                      std::uint64_t seed = 1)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise > 0 ? noise : 1.0);
  SweepCurve s;
  for (int i = 0; i < 1501; ++i) {
    double const f = 2.750e9 + i * 10e3;
    s.x.push_back(f);
    s.y.push_back(oracle::lorentzian_pair(f, c1, w1, c2, w2, depth) + (noise > 0 ? g(rng) : 0.0));
  }
  return s;
}

SweepCurve decay_curve(double w, double tf, double ts, double noise = 0, std::uint64_t seed = 1)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise > 0 ? noise : 1.0);
  SweepCurve s;
  for (int i = 1; i <= 150; ++i) {
    double const t = i * 2e-6;
    s.x.push_back(t);
    s.y.push_back(w * std::exp(-t / tf) + (1 - w) * std::exp(-t / ts) + (noise > 0 ? g(rng) : 0.0));
  }
  return s;
}

} // namespace

TEST(Lorentzian, DefaultRoundTrip)
{
  auto const f = fit_lorentzian_pair(odmr_curve(2.7556e9, 0.31e6, 2.7586e9, 0.34e6, 0.025));
  ASSERT_TRUE(f.converged);
  EXPECT_NEAR(f.value("center_1"), 2.7556e9, 2.7556e9 * 1e-3);
  EXPECT_NEAR(f.value("center_1"), 2.7556e9, 100.0);
  EXPECT_NEAR(f.value("center_2"), 2.7586e9, 100.0);
  EXPECT_NEAR(f.value("fwhm_1") / 0.31e6, 1.0, 1e-3);
  EXPECT_NEAR(f.value("fwhm_2") / 0.34e6, 1.0, 1e-3);
  EXPECT_NEAR(f.value("depth_1") / 0.025, 1.0, 1e-3);
  EXPECT_NEAR(f.value("depth_2") / 0.025, 1.0, 1e-3);
  EXPECT_NEAR(f.value("baseline"), 1.0, 1e-3);
  EXPECT_FALSE(f.has_warning("degenerate"));
  for (auto const &p : f.params) { EXPECT_GE(p.std_error, 0.0); }
}

TEST(Lorentzian, MergedDipsFlaggedDegenerate)
{
  auto const f = fit_lorentzian_pair(odmr_curve(2.757e9, 2e6, 2.7572e9, 2e6, 0.025));
  EXPECT_TRUE(f.has_warning("degenerate"));
}

TEST(Lorentzian, FlatSpectrumFails)
{
  SweepCurve s;
  for (int i = 0; i < 100; ++i) {
    s.x.push_back(i);
    s.y.push_back(1.0);
  }
  auto const f = fit_lorentzian_pair(s);
  EXPECT_FALSE(f.converged);
}

TEST(Lorentzian, ErrorsGrowWithNoise)
{
  double prev = 0;
  for (double sigma : {1e-4, 4e-4, 1.6e-3}) {
    auto const f = fit_lorentzian_pair(odmr_curve(2.7556e9, 0.31e6, 2.7586e9, 0.34e6, 0.025, sigma, 7));
    ASSERT_TRUE(f.converged);
    double const e = f.std_error("center_1");
    EXPECT_NEAR(f.value("center_1"), 2.7556e9, 5 * e);
    if (prev > 0) { EXPECT_NEAR(e / prev, 4.0, 1.0); }
    prev = e;
  }
}

TEST(DoubleExponential, DefaultRoundTrip)
{
  auto const f = fit_double_exponential(decay_curve(0.5, 33e-6, 77e-6));
  ASSERT_TRUE(f.converged);
  EXPECT_NEAR(f.value("t_fast") / 33e-6, 1.0, 0.01);
  EXPECT_NEAR(f.value("t_slow") / 77e-6, 1.0, 0.01);
  EXPECT_NEAR(f.value("weight"), 0.5, 0.005);
  EXPECT_NEAR(f.value("amplitude"), 1.0, 0.005);
  EXPECT_LE(f.value("t_fast"), f.value("t_slow"));
}

TEST(DoubleExponential, OrderNormalized)
{
  // fast component carries the small weight here; still reported first
  auto const f = fit_double_exponential(decay_curve(0.2, 20e-6, 90e-6));
  ASSERT_TRUE(f.converged);
  EXPECT_NEAR(f.value("t_fast") / 20e-6, 1.0, 0.01);
  EXPECT_NEAR(f.value("weight"), 0.2, 0.005);
}

TEST(DoubleExponential, SingleExponentialFlagged)
{
  auto const f = fit_double_exponential(decay_curve(0.5, 50e-6, 50e-6));
  EXPECT_TRUE(f.has_warning("effectively_single"));
}

TEST(DoubleExponential, EmptyInputRejected)
{
  EXPECT_THROW(fit_double_exponential(SweepCurve{}), DomainError);
}

TEST(DoubleExponential, NoisyRecoveryScalesWithNoise)
{
  double prev = 0;
  for (double sigma : {5e-4, 2e-3}) {
    auto const f = fit_double_exponential(decay_curve(0.5, 33e-6, 77e-6, sigma, 3));
    ASSERT_TRUE(f.converged);
    EXPECT_NEAR(f.value("t_slow"), 77e-6, 5 * f.std_error("t_slow"));
    if (prev > 0) { EXPECT_NEAR(f.std_error("t_slow") / prev, 4.0, 1.2); }
    prev = f.std_error("t_slow");
  }
}

TEST(Density, RoundTripFromSimulatedDecays)
{
  NVParams const p;
  std::vector<double> delays;
  for (int i = 1; i <= 150; ++i) { delays.push_back(i * 2e-6); }
  SweepCurve rates;
  for (int k = 0; k <= 6; ++k) {
    double const s2 = k / 6.0;
    auto const decay = simulate_hahn_decay(p, delays, 2 * std::asin(std::sqrt(s2)));
    auto const f = fit_double_exponential(SweepCurve{delays, decay, {}});
    ASSERT_TRUE(f.converged);
    rates.x.push_back(s2);
    rates.y.push_back(1.0 / f.value("t_slow"));
  }
  auto const d = nv_density_from_id(rates, p.consts, p.id_constant);
  EXPECT_NEAR(d.ppm / 0.05, 1.0, 0.02);
  EXPECT_TRUE(d.linear);
}

TEST(Density, ZeroSlopeFlagged)
{
  SweepCurve r{{0.0, 0.5, 1.0}, {1e4, 1e4, 1e4}, {}};
  auto const d = nv_density_from_id(r, PhysConsts{}, NVParams{}.id_constant);
  EXPECT_TRUE(d.zero_slope);
  EXPECT_EQ(d.ppm, 0.0);
}

TEST(Density, NegativeSlopeRejected)
{
  SweepCurve r{{0.0, 0.5, 1.0}, {3e4, 2e4, 1e4}, {}};
  EXPECT_THROW(nv_density_from_id(r, PhysConsts{}, NVParams{}.id_constant), NonPhysicalDensity);
  SweepCurve two{{0.0, 1.0}, {1e4, 2e4}, {}};
  EXPECT_THROW(nv_density_from_id(two, PhysConsts{}, NVParams{}.id_constant), DomainError);
}

TEST(Density, NonlinearFastRatesRejectedByResidualTest)
{
  // saturating dependence, as seen for the fast component
  SweepCurve r;
  for (int k = 0; k <= 6; ++k) {
    double const s2 = k / 6.0;
    r.x.push_back(s2);
    r.y.push_back(2.3e4 + 3e4 * (1 - std::exp(-4 * s2)));
  }
  auto const d = nv_density_from_id(r, PhysConsts{}, NVParams{}.id_constant);
  EXPECT_FALSE(d.linear);
  EXPECT_LT(d.fit.r_squared, linearity_r2_threshold);
}

TEST(FrequencyResolution, Examples)
{
  EXPECT_NEAR(frequency_resolution(26e-9, 100e-12), 73.96e3, 10.0);
  EXPECT_EQ(frequency_resolution(26e-9, 0.0), 0.0);
  EXPECT_NEAR(frequency_resolution(26e-9, 2e-9), 1.48e6, 0.01e6);
  for (double k : {0.5, 2.0, 7.0}) {
    EXPECT_NEAR(frequency_resolution(26e-9, k * 1e-10), k * frequency_resolution(26e-9, 1e-10), 1e-9);
  }
  EXPECT_THROW(frequency_resolution(0.0, 1e-10), DomainError);
}

TEST(PeakTau, SyntheticFilterShapedPeak)
{
  // weight of an XY8-16 sweep at fixed f_s, as a function of tau
  double const fs = 19.23e6;
  SweepCurve s;
  for (int i = 0; i <= 120; ++i) {
    double const tau = 20e-9 + i * 100e-12;
    s.x.push_back(tau);
    s.y.push_back(filter_function(build_xy8(16, tau, 12.5e-9), fs));
  }
  auto const pk = find_peak_tau(s);
  EXPECT_NEAR(pk.tau, 26.0e-9, 0.025e-9);
  EXPECT_FALSE(pk.ambiguous);
}

TEST(PeakTau, MonotoneIsBoundary)
{
  SweepCurve s{{1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 6}, {}};
  EXPECT_THROW(find_peak_tau(s), BoundaryPeakError);
}

TEST(PeakTau, TieTakesEarliest)
{
  SweepCurve s{{1, 2, 3, 4, 5, 6, 7, 8}, {0, 1, 3, 1, 0, 1, 3, 1}, {}};
  auto const pk = find_peak_tau(s);
  EXPECT_NEAR(pk.tau, 3.0, 1e-12);
  EXPECT_TRUE(pk.ambiguous);
}

TEST(PeakTau, AffineInvariance)
{
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SweepCurve s;
  for (int i = 0; i < 40; ++i) {
    s.x.push_back(i);
    s.y.push_back(-std::pow(i - 17.3, 2) + u(rng));
  }
  double const base = find_peak_tau(s).tau;
  for (double a : {0.1, 3.0, 1e6}) {
    SweepCurve t = s;
    for (double &v : t.y) { v = a * v - 42.0; }
    EXPECT_NEAR(find_peak_tau(t).tau, base, 1e-9);
  }
}

TEST(RepeatStats, Definitional)
{
  std::vector<SweepCurve> same(3, SweepCurve{{1, 2, 3}, {4, 5, 6}, {}});
  EXPECT_EQ(repeat_statistics(same, 2.0).sigma, 0.0);
  std::vector<SweepCurve> two{SweepCurve{{1, 2, 3}, {0, 1.5, 0}, {}}, SweepCurve{{1, 2, 3}, {0, 4.0, 0}, {}}};
  auto const st = repeat_statistics(two, 2.1);
  EXPECT_NEAR(st.sigma, 2.5 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(st.mean, 2.75, 1e-15);
}

TEST(RepeatStats, MisalignedGrids)
{
  std::vector<SweepCurve> t{SweepCurve{{1, 2, 3}, {0, 1, 0}, {}}, SweepCurve{{1, 2.5, 3}, {0, 1, 0}, {}}};
  EXPECT_THROW(repeat_statistics(t, 2.0), AlignmentError);
  std::vector<SweepCurve> len{SweepCurve{{1, 2, 3}, {0, 1, 0}, {}}, SweepCurve{{1, 2}, {0, 1}, {}}};
  EXPECT_THROW(repeat_statistics(len, 2.0), AlignmentError);
}

TEST(ContrastToField, RoundTripDefaultAmplitude)
{
  NVParams const p;
  auto const seq = build_xy8(16, 26e-9, 12.5e-9);
  double const d = field_to_contrast(0.44e-6, seq, p);
  EXPECT_NEAR(contrast_to_field(d, seq, p) / 0.44e-6, 1.0, 1e-4);
  EXPECT_EQ(contrast_to_field(0.0, seq, p), 0.0);
}

TEST(ContrastToField, RangeEdgeAndOutside)
{
  NVParams const p;
  auto const seq = build_xy8(16, 26e-9, 12.5e-9);
  double const k = resonant_phase(p.consts, 1.0, 128, 26e-9);
  double const dmax = xy8_signal(pi, seq, p);
  EXPECT_NEAR(contrast_to_field(dmax, seq, p), pi / k, 1e-12 / k);
  EXPECT_THROW(contrast_to_field(1.01 * dmax, seq, p), InversionError);
  EXPECT_THROW(contrast_to_field(-1e-3, seq, p), InversionError);
}

TEST(ContrastToField, PropertyOverRandomFields)
{
  NVParams const p;
  for (double rho : {0.0, pi / 2}) {
    BuildOptions o;
    o.readout_phase = rho;
    auto const seq = build_xy8(16, 26e-9, 12.5e-9, o);
    double const k = resonant_phase(p.consts, 1.0, 128, 26e-9);
    double const bmax = (rho == 0.0 ? pi : pi / 2) / k;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 0.5 * bmax);
    for (int i = 0; i < 200; ++i) {
      double const b = u(rng);
      double const back = contrast_to_field(field_to_contrast(b, seq, p), seq, p);
      EXPECT_NEAR(back, b, 1e-4 * b + 1e-15);
    }
  }
}

TEST(SweepCurveValidation, Invariants)
{
  EXPECT_THROW((SweepCurve{{1, 2}, {1}, {}}.validate()), DomainError);
  EXPECT_THROW((SweepCurve{{1, 1, 2}, {1, 1, 1}, {}}.validate()), DomainError);
  EXPECT_NO_THROW((SweepCurve{{3, 2, 1}, {1, 1, 1}, {}}.validate()));
}
