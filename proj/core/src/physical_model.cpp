#include "nvrf/physical_model.hpp"

#include "nvrf/errors.hpp"

#include <cmath>
#include <string>

namespace nvrf {

namespace {
constexpr double pi = std::numbers::pi;
}

void PhysConsts::validate() const
{
  if (!(gamma_e > 0) || !(mu0 > 0) || !(hbar > 0) || !(zero_field_splitting > 0) || !(carbon_density > 0)) {
    throw DomainError("physical constants must be strictly positive");
  }
  if (std::abs(gamma_e / 28.02e9 - 1.0) > 0.01) {
    throw DomainError("gamma_e must lie within 1% of 28.02 GHz/T, got " + std::to_string(gamma_e));
  }
}

double default_id_constant(PhysConsts const &c)
{
  return 4.0 * pi * c.mu0 * c.hbar / (9.0 * std::sqrt(3.0));
}

Eigen::Vector3d default_nv_axis()
{
  double const cos_a = 1.0 / std::sqrt(3.0);
  double const sin_a = std::sqrt(2.0 / 3.0);
  return {0.0, sin_a, cos_a};
}

void NVParams::validate() const
{
  consts.validate();
  if (std::abs(nv_axis.norm() - 1.0) > 1e-12) { throw DomainError("nv_axis must have unit norm"); }
  if (!(t2_fast > 0) || !(t2_slow > 0)) { throw DomainError("T2 times must be positive"); }
  if (t2_fast > t2_slow) { throw DomainError("t2_fast must not exceed t2_slow"); }
  if (!(fast_weight >= 0 && fast_weight <= 1)) { throw DomainError("fast_weight must lie in [0,1]"); }
  if (!(contrast > 0 && contrast < 1)) { throw DomainError("contrast must lie in (0,1)"); }
  if (!(hyperfine_A >= 0)) { throw DomainError("hyperfine splitting must be non-negative"); }
  if (!(n_nv_ppm >= 0)) { throw DomainError("NV density must be non-negative"); }
  if (!(id_constant >= 0)) { throw DomainError("instantaneous-diffusion constant must be non-negative"); }
}

std::pair<double, double> resonance_frequencies(NVParams const &p, double b_bias)
{
  if (b_bias < 0) { throw DomainError("bias field must be non-negative"); }
  double const sign = p.branch == SpinBranch::lower ? -1.0 : 1.0;
  double const mean = p.consts.zero_field_splitting + sign * p.consts.gamma_e * b_bias;
  double const half = 0.5 * p.hyperfine_A;
  return {mean - half, mean + half};
}

double bias_for_mean_frequency(NVParams const &p, double mean_frequency)
{
  double const sign = p.branch == SpinBranch::lower ? -1.0 : 1.0;
  double const b = sign * (mean_frequency - p.consts.zero_field_splitting) / p.consts.gamma_e;
  if (b < 0) { throw DomainError("mean frequency is on the other branch"); }
  return b;
}

double pi_length_from_rabi(double rabi_hz)
{
  if (!(rabi_hz > 0)) { throw DomainError("Rabi frequency must be positive"); }
  return 0.5 / rabi_hz;
}

double coherence_envelope(NVParams const &p, double t)
{
  if (t < 0) { throw DomainError("coherence_envelope needs t >= 0"); }
  return p.fast_weight * std::exp(-t / p.t2_fast) + (1.0 - p.fast_weight) * std::exp(-t / p.t2_slow);
}

double ppm_to_volume_density(PhysConsts const &c, double ppm)
{
  if (ppm < 0) { throw DomainError("ppm must be non-negative"); }
  return ppm * 1e-6 * c.carbon_density;
}

double volume_density_to_ppm(PhysConsts const &c, double density) { return density / c.carbon_density * 1e6; }

double id_rate(NVParams const &p, double theta)
{
  double const g = p.consts.gamma_angular();
  double const s = std::sin(0.5 * theta);
  return 0.25 * p.id_constant * g * g * ppm_to_volume_density(p.consts, p.n_nv_ppm) * s * s;
}

} // namespace nvrf
