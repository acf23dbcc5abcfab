#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include "pwsaf/array_solver.hpp"
#include "pwsaf/error.hpp"

namespace pwsaf {

/// Perturbation matrix of a synchronized solution in normalized time
/// tau = omega_ref t, ordering [dv_1..dv_N, dphi_1..dphi_N].
struct StabilityMatrix {
  Eigen::MatrixXd a;
  double omega_ref = 1.0;  ///< rad/s per unit of normalized time

  Eigen::Index size() const { return a.rows(); }
};

namespace detail {

/// Linearized residual R_i^lin / V_i for a unit perturbation vector x.
inline std::vector<cplx> perturbed_residuals(const ArraySpec& spec, const InjectionSource& inj,
                                             const SynchronizedSolution& sol,
                                             const Eigen::MatrixXcd& c,
                                             const std::vector<cplx>& y,
                                             const std::vector<element::Slopes>& sl,
                                             const std::vector<std::pair<cplx, cplx>>& g,
                                             const Eigen::VectorXd& x) {
  const std::size_t n = spec.size();
  const auto dv = [&](std::size_t i) { return x[static_cast<Eigen::Index>(i)]; };
  const auto dp = [&](std::size_t i) { return x[static_cast<Eigen::Index>(n + i)]; };
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx d = (sl[i].y_v * sol.v[i] + y[i]) * dv(i);
    for (std::size_t m = 0; m < n; ++m) {
      if (c(i, m) == 0.0) continue;
      d += c(i, m) * std::polar(1.0, sol.phi[m] - sol.phi[i]) *
           (dv(m) + j_unit * sol.v[m] * (dp(m) - dp(i)));
    }
    if (i == spec.q && inj.i_s != 0.0) {
      const double arg = inj.theta_s - sol.phi[i];
      d += inj.i_s * (g[i].first * std::sin(arg) - g[i].second * std::cos(arg)) * dp(i);
    }
    out[i] = d / sol.v[i];
  }
  return out;
}

}  // namespace detail

/// Builds A by unit-perturbation probing of the linearized residual. Each
/// oscillator's equation Y_omega (dphi' - j dv'/V) = -R^lin / V is solved for
/// the derivative pair. The frequency dependence of the coupling network is
/// not perturbed.
inline StabilityMatrix assemble_stability_matrix(const ArraySpec& spec, const InjectionSource& inj,
                                                 const SynchronizedSolution& sol) {
  const std::size_t n = spec.size();
  const std::vector<int> k =
      sol.k_vec.size() == n ? sol.k_vec : locate_anchors(spec, sol.eta);
  const Eigen::MatrixXcd c = coupling_matrix(spec.coupling, static_cast<int>(n), sol.omega_s);
  std::vector<cplx> y(n);
  std::vector<element::Slopes> sl(n);
  std::vector<std::pair<cplx, cplx>> g(n);
  const double omega_ref = spec.coupling.omega_ref();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = spec.models[i];
    y[i] = element::admittance(m, k[i], sol.v[i], sol.omega_s, sol.eta[i]);
    sl[i] = element::slopes(m, k[i], sol.v[i], sol.omega_s, sol.eta[i]);
    g[i] = element::injection_components(m, k[i], sol.v[i], sol.omega_s, sol.eta[i]);
    // Compare against the admittance scale |Y_V| V so the test is unit-free.
    if (std::abs(sl[i].y_omega) * omega_ref <= 1e-12 * std::abs(sl[i].y_v) * sol.v[i])
      throw numeric_error("stability: oscillator " + std::to_string(i + 1) +
                              " has no frequency sensitivity (Y_omega ~ 0)",
                          std::abs(sl[i].y_omega));
  }

  const auto dim = static_cast<Eigen::Index>(2 * n);
  StabilityMatrix out;
  out.omega_ref = omega_ref;
  out.a.resize(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Eigen::VectorXd unit = Eigen::VectorXd::Unit(dim, col);
    const auto r = detail::perturbed_residuals(spec, inj, sol, c, y, sl, g, unit);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx s = -r[i] / (sl[i].y_omega * omega_ref);
      out.a(static_cast<Eigen::Index>(i), col) = -sol.v[i] * s.imag();
      out.a(static_cast<Eigen::Index>(n + i), col) = s.real();
    }
  }
  if (!out.a.allFinite()) throw numeric_error("stability: matrix has non-finite entries", INFINITY);
  return out;
}

/// All eigenvalues [rad/s], ordered by descending real part (ties by
/// descending imaginary part).
inline std::vector<cplx> eigenvalues(const StabilityMatrix& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.a, false);
  if (es.info() != Eigen::Success)
    throw numeric_error("eigenvalues: QR iteration did not converge", INFINITY);
  std::vector<cplx> ev(static_cast<std::size_t>(m.a.rows()));
  for (Eigen::Index i = 0; i < m.a.rows(); ++i) ev[static_cast<std::size_t>(i)] = es.eigenvalues()[i];

  // A real matrix has a spectrum closed under conjugation.
  const double tol = 1e-8 * std::max(m.a.norm(), 1e-300);
  for (const cplx& l : ev) {
    if (l.imag() == 0.0) continue;
    const bool paired = std::any_of(ev.begin(), ev.end(), [&](const cplx& o) {
      return std::abs(o - std::conj(l)) <= tol;
    });
    if (!paired) throw numeric_error("eigenvalues: spectrum not closed under conjugation", l.imag());
  }
  for (cplx& l : ev) l *= m.omega_ref;
  std::sort(ev.begin(), ev.end(), [](const cplx& x, const cplx& y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
  return ev;
}

struct StabilityResult {
  std::vector<cplx> eigenvalues;      ///< rad/s, descending real part
  double max_re_nonstructural = 0.0;  ///< rad/s
  bool structural_zero_present = false;
  std::size_t zero_mode_count = 0;    ///< eigenvalues inside the zero-mode tolerance
  bool stable = false;
};

struct StabilityTolerances {
  double zero_mode = 1e-6;  ///< |lambda| < zero_mode * ||A||_F
  double margin = 1e-9;     ///< stable when Re lambda < -margin * ||A||_F
};

/// Classifies a spectrum; `scale` is ||A||_F in the eigenvalues' units. For a
/// free-running solution the eigenvalue closest to zero is the autonomy mode
/// and is excluded.
inline StabilityResult classify_stability(const std::vector<cplx>& eigs, bool free_running,
                                          double scale, const StabilityTolerances& tol = {}) {
  StabilityResult r;
  r.eigenvalues = eigs;
  std::vector<cplx> rest = eigs;
  const double zero_tol = tol.zero_mode * scale;
  r.zero_mode_count = static_cast<std::size_t>(
      std::count_if(eigs.begin(), eigs.end(), [&](const cplx& l) { return std::abs(l) < zero_tol; }));
  if (free_running) {
    if (eigs.empty()) throw numeric_error("classify_stability: empty spectrum", 0.0);
    const auto z = std::min_element(rest.begin(), rest.end(), [](const cplx& x, const cplx& y) {
      return std::abs(x) < std::abs(y);
    });
    if (!(std::abs(*z) < zero_tol))
      throw numeric_error(
          "classify_stability: free-running solution without a structural zero eigenvalue",
          std::abs(*z));
    r.structural_zero_present = true;
    rest.erase(z);
  }
  r.max_re_nonstructural = -INFINITY;
  for (const cplx& l : rest) r.max_re_nonstructural = std::max(r.max_re_nonstructural, l.real());
  r.stable = r.max_re_nonstructural < -tol.margin * scale;
  return r;
}

/// Matrix, spectrum and verdict for one solution.
inline StabilityResult analyze_stability(const ArraySpec& spec, const InjectionSource& inj,
                                         const SynchronizedSolution& sol,
                                         const StabilityTolerances& tol = {}) {
  const StabilityMatrix m = assemble_stability_matrix(spec, inj, sol);
  return classify_stability(eigenvalues(m), !inj.present(), m.a.norm() * m.omega_ref, tol);
}

// ---------------------------------------------------------------------------
// Stable range along a sweep

namespace detail {

/// Runs f(i) for i in [0, n) on up to `jobs` threads; the first exception is
/// rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

struct StabilityTracePoint {
  double dphi = 0.0;
  StabilityResult result;
};

struct StableInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_refined = false;  ///< lo is a bisected stability boundary
  bool hi_refined = false;
};

struct StableRangeOptions {
  double resolution = 1e-3;  ///< bisection width [rad]
  unsigned jobs = 1;
  SolverOptions solver{};
  StabilityTolerances tolerances{};
};

struct StableRangeResult {
  std::vector<StableInterval> intervals;
  std::vector<StabilityTracePoint> trace;  ///< converged sweep points only
};

/// Classifies every converged point of a phase sweep and refines each
/// stable/unstable transition by bisection on the phase shift.
inline StableRangeResult stable_range(const ArraySpec& spec, const InjectionSource& inj,
                                      const SolutionCurve& curve,
                                      const StableRangeOptions& opts = {}) {
  std::vector<const CurvePoint*> pts;
  std::vector<std::size_t> position;  // index in curve.points, to detect gaps
  for (std::size_t i = 0; i < curve.points.size(); ++i)
    if (curve.points[i].solution) {
      pts.push_back(&curve.points[i]);
      position.push_back(i);
    }

  StableRangeResult out;
  out.trace.resize(pts.size());
  detail::parallel_for(pts.size(), opts.jobs, [&](std::size_t i) {
    out.trace[i] = {pts[i]->param,
                    analyze_stability(spec, inj, *pts[i]->solution, opts.tolerances)};
  });

  // Bisects between a and b (one stable, one unstable) and returns the
  // parameter on the stable side of the final bracket.
  auto refine = [&](const CurvePoint& stable_pt, const CurvePoint& unstable_pt) {
    double s = stable_pt.param, u = unstable_pt.param;
    SynchronizedSolution warm_s = *stable_pt.solution, warm_u = *unstable_pt.solution;
    while (std::abs(u - s) > opts.resolution) {
      const double mid = 0.5 * (s + u);
      try {
        const auto sol = solve_constant_phase(spec, inj, mid, warm_s, opts.solver);
        if (analyze_stability(spec, inj, sol, opts.tolerances).stable) {
          s = mid;
          warm_s = sol;
        } else {
          u = mid;
          warm_u = sol;
        }
      } catch (const error&) {
        break;
      }
    }
    return std::pair{s, std::abs(u - s) <= opts.resolution};
  };

  std::optional<StableInterval> open;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool st = out.trace[i].result.stable;
    const bool contiguous = i > 0 && position[i] == position[i - 1] + 1;
    if (open && !contiguous) {  // a gap closes the interval at the last stable point
      out.intervals.push_back(*open);
      open.reset();
    }
    if (st && !open) {
      open = StableInterval{pts[i]->param, pts[i]->param, false, false};
      if (contiguous && !out.trace[i - 1].result.stable) {
        const auto [edge, ok] = refine(*pts[i], *pts[i - 1]);
        open->lo = edge;
        open->lo_refined = ok;
      }
    } else if (st) {
      open->hi = pts[i]->param;
    } else if (open) {
      const auto [edge, ok] = refine(*pts[i - 1], *pts[i]);
      open->hi = edge;
      open->hi_refined = ok;
      out.intervals.push_back(*open);
      open.reset();
    }
  }
  if (open) out.intervals.push_back(*open);
  return out;
}

}  // namespace pwsaf
