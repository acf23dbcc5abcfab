#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "pwsaf/error.hpp"

namespace pwsaf {

struct NewtonOptions {
  int max_iterations = 50;
  int max_halvings = 8;
  double tolerance = 1e-9;
  /// Relative central-difference step for the Jacobian.
  double fd_step = 1e-7;
  /// Extra iterations taken after the tolerance is met, kept only while the
  /// residual keeps shrinking.
  int polish_iterations = 3;
};

struct NewtonResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;
  double residual_norm = 0.0;
  int iterations = 0;
};

inline double max_norm(const Eigen::VectorXd& r) {
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

/// Central-difference Jacobian of `f` at `x`. Step for unknown j is
/// rel_step * max(|x_j|, scale_j).
template <class F>
Eigen::MatrixXd fd_jacobian(F&& f, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& scale, double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd jac;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = rel_step * std::max(std::abs(x[j]), scale[j]);
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Eigen::VectorXd fp = f(xp);
    const Eigen::VectorXd fm = f(xm);
    if (j == 0) jac.resize(fp.size(), n);
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

/// Solves J dx = -r; throws singular_jacobian when J is rank deficient.
inline Eigen::VectorXd newton_direction(const Eigen::MatrixXd& jac,
                                        const Eigen::VectorXd& r,
                                        double residual_norm) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
  if (!lu.isInvertible() || !std::isfinite(jac.sum()))
    throw singular_jacobian("singular Jacobian in Newton iteration", residual_norm);
  return lu.solve(-r);
}

/// One damped Newton step from (x, r). Halves the step while the candidate is
/// inadmissible or does not reduce the residual norm; after `max_halvings`
/// the smallest admissible candidate is taken anyway. Returns false when no
/// admissible candidate exists.
template <class F, class Norm, class Admissible>
bool damped_step(F&& f, Norm&& norm, Admissible&& admissible,
                 const Eigen::VectorXd& x, const Eigen::VectorXd& r,
                 const Eigen::VectorXd& dx, int max_halvings,
                 Eigen::VectorXd& x_out, Eigen::VectorXd& r_out) {
  const double r0 = norm(r);
  double lambda = 1.0;
  bool have_fallback = false;
  for (int h = 0; h <= max_halvings; ++h, lambda *= 0.5) {
    Eigen::VectorXd xc = x + lambda * dx;
    if (!admissible(xc)) continue;
    Eigen::VectorXd rc = f(xc);
    if (!rc.allFinite()) continue;
    x_out = std::move(xc);
    r_out = std::move(rc);
    have_fallback = true;
    if (norm(r_out) < r0) return true;
  }
  return have_fallback;
}

/// Damped Newton with finite-difference Jacobian on a smooth map.
///
/// `norm` measures convergence (tolerance compares against it) and
/// `admissible` rejects candidates outside the domain (negative amplitudes,
/// out-of-range tuning voltages). Throws numeric_error on failure.
template <class F, class Norm, class Admissible>
NewtonResult damped_newton(F&& f, Norm&& norm, Admissible&& admissible,
                           Eigen::VectorXd x, const Eigen::VectorXd& scale,
                           const NewtonOptions& opts) {
  Eigen::VectorXd r = f(x);
  if (!r.allFinite()) throw numeric_error("non-finite residual at initial guess", INFINITY);
  double rn = norm(r);
  int it = 0;
  for (; it < opts.max_iterations && rn >= opts.tolerance; ++it) {
    const Eigen::MatrixXd jac = fd_jacobian(f, x, scale, opts.fd_step);
    const Eigen::VectorXd dx = newton_direction(jac, r, rn);
    Eigen::VectorXd xn, rnv;
    if (!damped_step(f, norm, admissible, x, r, dx, opts.max_halvings, xn, rnv))
      throw numeric_error("Newton step left the admissible domain", rn);
    x = std::move(xn);
    r = std::move(rnv);
    rn = norm(r);
  }
  if (rn >= opts.tolerance)
    throw numeric_error("Newton did not converge in " + std::to_string(opts.max_iterations) +
                            " iterations",
                        rn);
  for (int p = 0; p < opts.polish_iterations && rn > 0.0; ++p) {
    const Eigen::MatrixXd jac = fd_jacobian(f, x, scale, opts.fd_step);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) break;
    const Eigen::VectorXd xc = x + lu.solve(-r);
    if (!admissible(xc)) break;
    const Eigen::VectorXd rc = f(xc);
    if (!rc.allFinite() || !(norm(rc) < rn)) break;
    x = xc;
    r = rc;
    rn = norm(r);
  }
  return {std::move(x), std::move(r), rn, it};
}

}  // namespace pwsaf
