#include "nvrf/levenberg_marquardt.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace nvrf {

LMResult levenberg_marquardt(ResidualFn const &fn, Eigen::VectorXd p0, int n_residuals, LMOptions const &opt)
{
  auto const n = static_cast<int>(p0.size());
  LMResult res;
  res.params = std::move(p0);

  Eigen::VectorXd r(n_residuals);
  Eigen::MatrixXd J(n_residuals, n);
  fn(res.params, r, J);
  double cost = r.squaredNorm();
  double lambda = opt.initial_lambda;

  Eigen::VectorXd r_try(n_residuals);
  Eigen::MatrixXd J_try(n_residuals, n);

  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it + 1;
    Eigen::MatrixXd const JtJ = J.transpose() * J;
    Eigen::VectorXd const g = J.transpose() * r;
    Eigen::VectorXd diag = JtJ.diagonal().cwiseMax(1e-300);

    bool accepted = false;
    double step_rel = 0;
    for (int inner = 0; inner < 40; ++inner) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += lambda * diag;
      Eigen::VectorXd const dp = -A.ldlt().solve(g);
      if (!dp.allFinite()) {
        lambda *= 10;
        continue;
      }
      Eigen::VectorXd const p_try = res.params + dp;
      fn(p_try, r_try, J_try);
      double const cost_try = r_try.allFinite() ? r_try.squaredNorm() : std::numeric_limits<double>::infinity();
      if (cost_try <= cost) {
        step_rel = dp.norm() / (res.params.norm() + 1e-300);
        res.params = p_try;
        r = r_try;
        J = J_try;
        cost = cost_try;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 10;
    }
    if (!accepted) {
      // No downhill step at any damping: the current point is a minimum to
      // working precision.
      res.converged = true;
      break;
    }
    if (step_rel < opt.relative_step_tolerance || cost == 0) {
      res.converged = true;
      break;
    }
  }

  res.residual_norm = std::sqrt(cost);
  Eigen::MatrixXd const JtJ = J.transpose() * J;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(JtJ);
  res.standard_errors = Eigen::VectorXd::Zero(n);
  if (lu.isInvertible() && n_residuals > n) {
    res.covariance = lu.inverse() * (cost / (n_residuals - n));
    for (int i = 0; i < n; ++i) {
      res.standard_errors(i) = std::sqrt(std::max(0.0, res.covariance(i, i)));
    }
  } else {
    res.covariance = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
    res.standard_errors.setConstant(std::numeric_limits<double>::infinity());
  }
  return res;
}

} // namespace nvrf
