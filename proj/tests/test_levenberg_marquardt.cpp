#include "nvrf/levenberg_marquardt.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nvrf;

TEST(LevenbergMarquardt, Rosenbrock)
{
  // residuals (1 - a, 10 (b - a^2)) have the unique zero at (1, 1)
  auto fn = [](Eigen::VectorXd const &p, Eigen::VectorXd &r, Eigen::MatrixXd &J) {
    r.resize(2);
    J.resize(2, 2);
    r << 1 - p[0], 10 * (p[1] - p[0] * p[0]);
    J << -1, 0, -20 * p[0], 10;
  };
  Eigen::VectorXd p0(2);
  p0 << -1.2, 1.0;
  auto const res = levenberg_marquardt(fn, p0, 2);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.params[0], 1.0, 1e-8);
  EXPECT_NEAR(res.params[1], 1.0, 1e-8);
  EXPECT_LE(res.iterations, 200);
}

TEST(LevenbergMarquardt, ExponentialWithErrors)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> t;
  std::vector<double> y;
  for (int i = 0; i < 200; ++i) {
    t.push_back(i * 0.05);
    y.push_back(2.0 * std::exp(-0.7 * t.back()) + noise(rng));
  }
  auto fn = [&](Eigen::VectorXd const &p, Eigen::VectorXd &r, Eigen::MatrixXd &J) {
    r.resize(200);
    J.resize(200, 2);
    for (int i = 0; i < 200; ++i) {
      double const e = std::exp(-p[1] * t[i]);
      r[i] = p[0] * e - y[i];
      J(i, 0) = e;
      J(i, 1) = -p[0] * t[i] * e;
    }
  };
  Eigen::VectorXd p0(2);
  p0 << 1.0, 0.3;
  auto const res = levenberg_marquardt(fn, p0, 200);
  ASSERT_TRUE(res.converged);
  EXPECT_NEAR(res.params[0], 2.0, 5 * res.standard_errors[0]);
  EXPECT_NEAR(res.params[1], 0.7, 5 * res.standard_errors[1]);
  EXPECT_GT(res.standard_errors[0], 0.0);
  EXPECT_LT(res.standard_errors[1], 0.01);
  EXPECT_NEAR(res.covariance(0, 0), res.standard_errors[0] * res.standard_errors[0], 1e-15);
}
