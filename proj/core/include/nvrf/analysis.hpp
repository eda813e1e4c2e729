#pragma once

#include "physical_model.hpp"
#include "pulse_compiler.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nvrf {

struct SweepCurve
{
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma; ///< empty or same length as x

  std::size_t size() const { return x.size(); }
  /// Throws DomainError unless lengths agree and x is strictly monotone.
  void validate() const;
};

struct FitParameter
{
  std::string name;
  double value = 0;
  double std_error = 0;
};

struct FitResult
{
  std::vector<FitParameter> params;
  double residual_norm = 0;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;

  double value(std::string const &name) const;
  double std_error(std::string const &name) const;
  bool has_warning(std::string const &w) const;
};

/// Two-Lorentzian dip model; parameters baseline, depth_1, center_1, fwhm_1,
/// depth_2, center_2, fwhm_2 with center_1 < center_2. Warns "degenerate"
/// when the centers fall within one linewidth.
FitResult fit_lorentzian_pair(SweepCurve const &spectrum);

/// a (w e^{-t/t_fast} + (1-w) e^{-t/t_slow}); parameters amplitude, weight,
/// t_fast, t_slow. Warns "effectively_single" for w near 0/1 or t_fast ~ t_slow.
FitResult fit_double_exponential(SweepCurve const &decay);

struct LinearFit
{
  double slope = 0;
  double intercept = 0;
  double slope_error = 0;
  double r_squared = 0;
};
LinearFit weighted_linear_fit(SweepCurve const &c);

/// R^2 threshold of the linearity residual test.
inline constexpr double linearity_r2_threshold = 0.999;

struct DensityEstimate
{
  double ppm = 0;
  double ppm_error = 0;
  LinearFit fit;
  bool linear = false;     ///< R^2 above the residual-test threshold
  bool zero_slope = false;
};

/// Weighted linear fit of decay rate vs sin^2(theta/2); slope / ((A/4) gamma^2)
/// converted to ppm. Throws NonPhysicalDensity for a negative slope.
DensityEstimate nv_density_from_id(SweepCurve const &rates, PhysConsts const &c, double id_constant);

/// delta_tau / (2 tau^2).
double frequency_resolution(double tau, double delta_tau);

struct PeakEstimate
{
  double tau = 0;
  double amplitude = 0;
  double uncertainty = 0;
  bool ambiguous = false;
};

/// Parabolic interpolation about the discrete maximum. Ties resolve to the
/// earliest abscissa with `ambiguous` set. Throws BoundaryPeakError when the
/// maximum is at either end.
PeakEstimate find_peak_tau(SweepCurve const &sweep);

struct RepeatStats
{
  double mean = 0;
  double sigma = 0; ///< n-1 denominator
};

/// Statistics of the traces' ordinates at the grid point nearest `at`.
RepeatStats repeat_statistics(std::vector<SweepCurve> const &traces, double at);

/// Inverts xy8_signal o phase_closed_form (resonant slope) for the sequence's
/// readout phase. Throws InversionError outside the invertible range.
double contrast_to_field(double delta_contrast, SequenceSpec const &seq, NVParams const &p);

/// Forward map used by contrast_to_field, exposed for round-trip checks.
double field_to_contrast(double field, SequenceSpec const &seq, NVParams const &p);

} // namespace nvrf
