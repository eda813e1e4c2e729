#pragma once

#include <Eigen/Core>
#include <functional>

namespace nvrf {

struct LMOptions
{
  int max_iterations = 200;
  double relative_step_tolerance = 1e-10;
  double initial_lambda = 1e-3;
};

struct LMResult
{
  Eigen::VectorXd params;
  Eigen::VectorXd standard_errors;
  Eigen::MatrixXd covariance;
  double residual_norm = 0;
  int iterations = 0;
  bool converged = false;
};

/// Fills residuals r (size m) and Jacobian J (m x n, dr/dp) at p.
using ResidualFn = std::function<void(Eigen::VectorXd const &p, Eigen::VectorXd &r, Eigen::MatrixXd &J)>;

/// Damped Gauss-Newton with Marquardt diagonal scaling. Standard errors come
/// from (J^T J)^-1 scaled by RSS/(m - n).
LMResult levenberg_marquardt(ResidualFn const &fn, Eigen::VectorXd p0, int n_residuals, LMOptions const &opt = {});

} // namespace nvrf
