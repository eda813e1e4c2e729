#pragma once

#include <Eigen/Core>
#include <numbers>
#include <utility>

namespace nvrf {

/// Physical constants used throughout. All values SI; frequencies in Hz.
struct PhysConsts
{
  double gamma_e = 28.0249e9;      ///< electron gyromagnetic ratio, Hz/T
  double mu0 = 1.25663706212e-6;   ///< vacuum permeability, T m/A
  double hbar = 1.054571817e-34;   ///< reduced Planck constant, J s
  double zero_field_splitting = 2.870e9; ///< D, Hz
  double carbon_density = 1.76e29; ///< diamond atoms per m^3 (3.52 g/cm^3)

  /// Angular gyromagnetic ratio, rad/(s T).
  double gamma_angular() const { return 2.0 * std::numbers::pi * gamma_e; }

  /// Throws DomainError when a constant is non-positive or gamma_e strays
  /// more than 1% from 28.02 GHz/T.
  void validate() const;
};

enum class SpinBranch
{
  lower, ///< m_s = 0 <-> -1, frequency falls with field
  upper
};

/// Dipolar instantaneous-diffusion constant, 4 pi mu0 hbar / (9 sqrt 3).
double default_id_constant(PhysConsts const &c);

/// Default NV axis: [111] of a (100) chip with its in-plane projection
/// along the wire, i.e. (0, sqrt(2/3), 1/sqrt(3)).
Eigen::Vector3d default_nv_axis();

struct NVParams
{
  PhysConsts consts{};
  double hyperfine_A = 3.0e6;   ///< 15N hyperfine splitting, Hz
  double t2_fast = 33e-6;       ///< s
  double t2_slow = 77e-6;       ///< s
  double fast_weight = 0.5;
  double contrast = 0.05;       ///< readout contrast
  Eigen::Vector3d nv_axis = default_nv_axis();
  double n_nv_ppm = 0.05;
  double id_constant = default_id_constant(PhysConsts{});
  SpinBranch branch = SpinBranch::lower;

  /// Throws DomainError on any broken invariant (axis norm within 1e-12,
  /// t2_fast <= t2_slow, 0 < contrast < 1, weight in [0,1]).
  void validate() const;
};

/// The two 15N hyperfine lines (lower, upper) of the selected electron-spin
/// transition at bias field b_bias (T, along the NV axis).
std::pair<double, double> resonance_frequencies(NVParams const &p, double b_bias);

/// Bias field that puts the mean of the two lines at `mean_frequency`.
double bias_for_mean_frequency(NVParams const &p, double mean_frequency);

/// Rectangular-drive pi length 1/(2 Omega).
double pi_length_from_rabi(double rabi_hz);

/// Double-exponential Hahn envelope w exp(-t/T2f) + (1-w) exp(-t/T2s).
double coherence_envelope(NVParams const &p, double t);

/// ppm of carbon sites -> m^-3.
double ppm_to_volume_density(PhysConsts const &c, double ppm);
double volume_density_to_ppm(PhysConsts const &c, double density);

/// Instantaneous-diffusion decay rate (1/s) for flip angle theta:
/// (A_id/4) gamma^2 n_NV sin^2(theta/2), gamma angular.
double id_rate(NVParams const &p, double theta);

} // namespace nvrf
