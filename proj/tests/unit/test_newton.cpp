#include <gtest/gtest.h>

#include <cmath>

#include "pwsaf/newton.hpp"

using namespace pwsaf;
using Eigen::VectorXd;

namespace {

auto always = [](const VectorXd&) { return true; };
auto maxn = [](const VectorXd& r) { return max_norm(r); };

}  // namespace

TEST(FdJacobian, ExactForQuadratics) {
  auto f = [](const VectorXd& x) {
    VectorXd r(2);
    r << x[0] * x[0] + 3 * x[1], x[0] * x[1];
    return r;
  };
  VectorXd x(2), s = VectorXd::Ones(2);
  x << 1.5, -2.0;
  const auto j = fd_jacobian(f, x, s, 1e-5);
  EXPECT_NEAR(j(0, 0), 3.0, 1e-9);
  EXPECT_NEAR(j(0, 1), 3.0, 1e-9);
  EXPECT_NEAR(j(1, 0), -2.0, 1e-9);
  EXPECT_NEAR(j(1, 1), 1.5, 1e-9);
}

TEST(DampedNewton, SolvesCircleLineIntersection) {
  auto f = [](const VectorXd& x) {
    VectorXd r(2);
    r << x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1];
    return r;
  };
  VectorXd x0(2);
  x0 << 3.0, 0.5;
  const auto res = damped_newton(f, maxn, always, x0, VectorXd::Ones(2), NewtonOptions{});
  EXPECT_NEAR(res.x[0], std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(res.x[1], std::sqrt(2.0), 1e-12);
  EXPECT_LT(res.residual_norm, 1e-9);
}

TEST(DampedNewton, AdmissibilityKeepsPositiveRoot) {
  auto f = [](const VectorXd& x) {
    VectorXd r(1);
    r << x[0] * x[0] - 9.0;
    return r;
  };
  auto positive = [](const VectorXd& x) { return x[0] > 0.0; };
  VectorXd x0(1);
  x0 << 0.2;  // the full first step lands near x = 22
  const auto res = damped_newton(f, maxn, positive, x0, VectorXd::Ones(1), NewtonOptions{});
  EXPECT_NEAR(res.x[0], 3.0, 1e-12);
}

TEST(DampedNewton, ArctanNeedsDamping) {
  // Undamped Newton on atan diverges from |x0| > 1.39.
  auto f = [](const VectorXd& x) {
    VectorXd r(1);
    r << std::atan(x[0]);
    return r;
  };
  VectorXd x0(1);
  x0 << 3.0;
  const auto res = damped_newton(f, maxn, always, x0, VectorXd::Ones(1), NewtonOptions{});
  EXPECT_NEAR(res.x[0], 0.0, 1e-9);
}

TEST(DampedNewton, SingularJacobianThrows) {
  auto f = [](const VectorXd& x) {
    VectorXd r(2);
    r << x[0] + x[1] - 1.0, 2 * x[0] + 2 * x[1] - 1.0;
    return r;
  };
  EXPECT_THROW(damped_newton(f, maxn, always, VectorXd::Zero(2), VectorXd::Ones(2), NewtonOptions{}),
               singular_jacobian);
}

TEST(DampedNewton, NoRootReportsResidual) {
  auto f = [](const VectorXd& x) {
    VectorXd r(1);
    r << x[0] * x[0] + 1.0;
    return r;
  };
  VectorXd x0(1);
  x0 << 0.7;
  NewtonOptions o;
  o.max_iterations = 20;
  try {
    damped_newton(f, maxn, always, x0, VectorXd::Ones(1), o);
    FAIL();
  } catch (const numeric_error& e) {
    EXPECT_GE(e.residual(), 1.0);
  }
}

TEST(DampedNewton, AlreadyConvergedTakesNoIteration) {
  auto f = [](const VectorXd& x) { return VectorXd(x.array() - 1.0); };
  const auto res = damped_newton(f, maxn, always, VectorXd::Ones(3), VectorXd::Ones(3), NewtonOptions{});
  EXPECT_EQ(res.iterations, 0);
  EXPECT_EQ(res.residual_norm, 0.0);
}
