#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pwsaf/coupling.hpp"
#include "pwsaf/error.hpp"
#include "pwsaf/extraction.hpp"
#include "pwsaf/newton.hpp"
#include "pwsaf/oscillator.hpp"

namespace pwsaf {

// ---------------------------------------------------------------------------
// Per-oscillator models

/// Direct use of the nonlinear oracle (the exact first-harmonic reference).
struct OracleElement {
  std::shared_ptr<const OscillatorModel> oscillator;
  double eta_min = 0.0;
  double eta_max = std::numeric_limits<double>::infinity();
};

using ElementModel = std::variant<PiecewiseModel, NonPwModel, OracleElement>;

/// Anchor value reported for models without piecewise indices.
inline constexpr int no_anchor = -1;

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

/// Operations shared by every element model. The anchor selects the sample of
/// a piecewise model; other models ignore it.
namespace element {

inline std::pair<double, double> validity_range(const ElementModel& m) {
  return std::visit(
      detail::overloaded{
          [](const PiecewiseModel& pw) { return std::pair{pw.eta_min(), pw.eta_max()}; },
          [](const NonPwModel&) {
            return std::pair{-std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity()};
          },
          [](const OracleElement& o) { return std::pair{o.eta_min, o.eta_max}; }},
      m);
}

inline bool in_range(const ElementModel& m, double eta) {
  const auto [lo, hi] = validity_range(m);
  return eta >= lo && eta <= hi;
}

inline int anchor(const ElementModel& m, double eta) {
  return std::visit(detail::overloaded{
                        [&](const PiecewiseModel& pw) {
                          return static_cast<int>(pw.anchor_index(eta));
                        },
                        [](const NonPwModel&) { return 0; },
                        [&](const OracleElement& o) {
                          if (!(eta >= o.eta_min && eta <= o.eta_max))
                            throw range_error("tuning voltage outside oracle range", 0, eta);
                          return no_anchor;
                        }},
                    m);
}

/// Set of tuning voltages that map to `a`, as [lo, hi].
inline std::pair<double, double> anchor_domain(const ElementModel& m, int a) {
  if (const auto* pw = std::get_if<PiecewiseModel>(&m)) {
    const auto& s = pw->samples();
    const auto k = static_cast<std::size_t>(a);
    if (pw->anchoring() == Anchoring::left) {
      const std::size_t last = s.size() - 2;
      return {s[std::min(k, last)].eta_c, s[std::min(k, last) + 1].eta_c};
    }
    const double lo = k == 0 ? s[0].eta_c : 0.5 * (s[k - 1].eta_c + s[k].eta_c);
    const double hi = k + 1 == s.size() ? s[k].eta_c : 0.5 * (s[k].eta_c + s[k + 1].eta_c);
    return {lo, hi};
  }
  return validity_range(m);
}

inline const AdmittanceSample* sample(const ElementModel& m, int a) {
  if (const auto* pw = std::get_if<PiecewiseModel>(&m))
    return &pw->samples()[static_cast<std::size_t>(a)];
  if (const auto* np = std::get_if<NonPwModel>(&m)) return &np->sample;
  return nullptr;
}

inline cplx admittance(const ElementModel& m, int a, double v, double omega, double eta) {
  if (const auto* s = sample(m, a)) return linearized_admittance(*s, v, omega, eta);
  return std::get<OracleElement>(m).oscillator->admittance(v, omega, eta);
}

/// (I_Gr, I_Gi).
inline std::pair<cplx, cplx> injection_components(const ElementModel& m, int a, double v,
                                                  double omega, double eta) {
  if (const auto* s = sample(m, a)) {
    const auto inj = s->injection();
    return {inj.i_gr(), inj.i_gi()};
  }
  return std::get<OracleElement>(m).oscillator->injection_components(v, omega, eta);
}

struct Slopes {
  cplx y_v;
  cplx y_omega;
};

/// dY/dV and dY/domega at a point; finite differences for the oracle.
inline Slopes slopes(const ElementModel& m, int a, double v, double omega, double eta) {
  if (const auto* s = sample(m, a)) return {s->y_v, s->y_omega};
  const auto& osc = *std::get<OracleElement>(m).oscillator;
  const DerivativeSteps steps;
  const double hv = steps.v_rel * v, hw = steps.omega_rel * omega;
  return {(osc.admittance(v + hv, omega, eta) - osc.admittance(v - hv, omega, eta)) / (2 * hv),
          (osc.admittance(v, omega + hw, eta) - osc.admittance(v, omega - hw, eta)) / (2 * hw)};
}

/// Free-running point of the model itself at eta.
inline FreeRunningPoint free_running(const ElementModel& m, double eta) {
  if (const auto* o = std::get_if<OracleElement>(&m)) return solve_free_running(*o->oscillator, eta);
  const AdmittanceSample& s = *sample(m, anchor(m, eta));
  // Y_v dV + Y_w dw = -Y_eta (eta - eta_c), two real equations.
  const cplx rhs = -s.y_eta * (eta - s.eta_c);
  Eigen::Matrix2d a;
  a << s.y_v.real(), s.y_omega.real(), s.y_v.imag(), s.y_omega.imag();
  const Eigen::Vector2d d = a.fullPivLu().solve(Eigen::Vector2d(rhs.real(), rhs.imag()));
  return {s.v_o + d[0], s.omega_o() + d[1]};
}

}  // namespace element

// ---------------------------------------------------------------------------
// Problem definition

struct ArraySpec {
  std::vector<ElementModel> models;
  CouplingParams coupling;
  std::size_t q = 0;  ///< reference (and injected) oscillator, zero-based
  double eta_q = 0.0;

  std::size_t size() const { return models.size(); }

  void validate() const {
    coupling.validate();
    if (models.size() < 2) throw domain_error("array: need N >= 2 oscillators");
    if (q >= models.size()) throw domain_error("array: reference index q out of range");
    if (!element::in_range(models[q], eta_q))
      throw range_error("array: eta_q outside the reference model's validity range", q, eta_q);
  }
};

/// Injection current i_s(t) = I_s cos(omega_s t + theta_s) at oscillator q.
struct InjectionSource {
  double i_s = 0.0;      ///< [A]
  double theta_s = 0.0;  ///< [rad]

  bool present() const { return i_s > 0.0; }
};

struct SynchronizedSolution {
  std::vector<double> v;    ///< amplitudes [V]
  std::vector<double> phi;  ///< phases [rad], phi_q = 0
  std::vector<double> eta;  ///< tuning voltages [V]
  double omega_s = 0.0;     ///< [rad/s]
  std::vector<int> k_vec;   ///< anchor sample per oscillator (no_anchor for the oracle)
  double residual_norm = 0.0;
  int iterations = 0;
  /// Set when the piecewise model has no self-consistent interval assignment
  /// (the linear pieces leave a gap at a sample boundary) and the solution of
  /// the closest piece was accepted.
  bool boundary_gap = false;
};

struct SolverOptions {
  NewtonOptions newton{};
  /// Largest accepted excursion of a tuning voltage outside its anchor's
  /// interval, as a fraction of that interval's width.
  double gap_fraction = 0.05;
};

// ---------------------------------------------------------------------------
// Residual

/// Phases of a constant phase-shift state with phi_q = 0.
inline std::vector<double> constant_shift_phases(std::size_t n, std::size_t q, double dphi) {
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i)
    phi[i] = (static_cast<double>(i) - static_cast<double>(q)) * dphi;
  return phi;
}

/// Anchors for every oscillator; throws range_error naming the oscillator.
inline std::vector<int> locate_anchors(const ArraySpec& spec, const std::vector<double>& eta) {
  std::vector<int> k(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    try {
      k[i] = element::anchor(spec.models[i], eta[i]);
    } catch (const range_error& e) {
      throw range_error("oscillator " + std::to_string(i + 1) + ": " + e.what(), i, eta[i]);
    }
  }
  return k;
}

/// Complex KCL residuals R_i with the given anchors.
inline std::vector<cplx> complex_residuals(const ArraySpec& spec, const InjectionSource& inj,
                                           const std::vector<double>& v,
                                           const std::vector<double>& phi,
                                           const std::vector<double>& eta, double omega,
                                           const std::vector<int>& anchors) {
  const std::size_t n = spec.size();
  const Eigen::MatrixXcd c = coupling_matrix(spec.coupling, static_cast<int>(n), omega);
  std::vector<cplx> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx ri = element::admittance(spec.models[i], anchors[i], v[i], omega, eta[i]) * v[i];
    for (std::size_t m = 0; m < n; ++m)
      if (c(i, m) != 0.0) ri += c(i, m) * v[m] * std::polar(1.0, phi[m] - phi[i]);
    if (i == spec.q && inj.i_s != 0.0) {
      const auto [gr, gi] =
          element::injection_components(spec.models[i], anchors[i], v[i], omega, eta[i]);
      ri += inj.i_s * (gr * std::cos(inj.theta_s - phi[i]) + gi * std::sin(inj.theta_s - phi[i]));
    }
    r[i] = ri;
  }
  return r;
}

/// 2N real residuals (Re R_1, Im R_1, ...). Uses the state's k_vec when it is
/// populated, otherwise locates the anchors from eta.
inline Eigen::VectorXd assemble_residual(const ArraySpec& spec, const InjectionSource& inj,
                                         const SynchronizedSolution& state) {
  const std::vector<int> anchors =
      state.k_vec.size() == spec.size() ? state.k_vec : locate_anchors(spec, state.eta);
  const auto r = complex_residuals(spec, inj, state.v, state.phi, state.eta, state.omega_s, anchors);
  Eigen::VectorXd out(2 * static_cast<Eigen::Index>(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    out[2 * static_cast<Eigen::Index>(i)] = r[i].real();
    out[2 * static_cast<Eigen::Index>(i) + 1] = r[i].imag();
  }
  return out;
}

/// Free-running point of the reference model at eta_q.
inline FreeRunningPoint reference_point(const ArraySpec& spec) {
  return element::free_running(spec.models[spec.q], spec.eta_q);
}

/// Convergence metric: max-norm of the residuals divided by the reference amplitude [S].
inline double residual_norm(const ArraySpec& spec, const Eigen::VectorXd& r) {
  return max_norm(r) / reference_point(spec).v_o;
}

/// Guess from the weak-coupling premise: every oscillator at the reference
/// model's free-running point at eta_q.
inline SynchronizedSolution initial_guess(const ArraySpec& spec, double dphi = 0.0) {
  const FreeRunningPoint ref = reference_point(spec);
  const std::size_t n = spec.size();
  SynchronizedSolution g;
  g.v.assign(n, ref.v_o);
  g.eta.assign(n, spec.eta_q);
  g.phi = constant_shift_phases(n, spec.q, dphi);
  g.omega_s = ref.omega_o;
  return g;
}

// ---------------------------------------------------------------------------
// Constant phase-shift solve

namespace detail {

/// Unknown layout [V_1..V_N, eta_i (i != q), omega_s / omega_ref].
struct Layout {
  std::size_t n;
  std::size_t q;
  double omega_ref;
  double eta_q;

  Eigen::Index size() const { return static_cast<Eigen::Index>(2 * n); }

  Eigen::VectorXd pack(const SynchronizedSolution& s) const {
    Eigen::VectorXd x(size());
    Eigen::Index p = 0;
    for (std::size_t i = 0; i < n; ++i) x[p++] = s.v[i];
    for (std::size_t i = 0; i < n; ++i)
      if (i != q) x[p++] = s.eta[i];
    x[p] = s.omega_s / omega_ref;
    return x;
  }

  void unpack(const Eigen::VectorXd& x, std::vector<double>& v, std::vector<double>& eta,
              double& omega) const {
    v.resize(n);
    eta.resize(n);
    Eigen::Index p = 0;
    for (std::size_t i = 0; i < n; ++i) v[i] = x[p++];
    for (std::size_t i = 0; i < n; ++i) eta[i] = i == q ? eta_q : x[p++];
    omega = x[p] * omega_ref;
  }
};

}  // namespace detail

/// Solves the coupled system for a constant phase shift dphi between
/// neighbours. Unknowns: all amplitudes, every tuning voltage but eta_q, and
/// omega_s. The piecewise anchors are re-located after every Newton step.
inline SynchronizedSolution solve_constant_phase(const ArraySpec& spec, const InjectionSource& inj,
                                                 double dphi,
                                                 const std::optional<SynchronizedSolution>& guess,
                                                 const SolverOptions& opts = {}) {
  spec.validate();
  const std::size_t n = spec.size();
  const detail::Layout layout{n, spec.q, spec.coupling.omega_ref(), spec.eta_q};
  const std::vector<double> phi = constant_shift_phases(n, spec.q, dphi);
  const double v_ref = reference_point(spec).v_o;

  SynchronizedSolution start = guess ? *guess : initial_guess(spec, dphi);
  start.eta[spec.q] = spec.eta_q;
  Eigen::VectorXd x = layout.pack(start);

  std::vector<double> v, eta;
  double omega = 0.0;
  auto frozen = [&](const std::vector<int>& anchors) {
    return [&spec, &inj, &phi, &layout, v_ref, anchors](const Eigen::VectorXd& xx) {
      std::vector<double> vv, ee;
      double w = 0.0;
      layout.unpack(xx, vv, ee, w);
      const auto r = complex_residuals(spec, inj, vv, phi, ee, w, anchors);
      Eigen::VectorXd out(2 * static_cast<Eigen::Index>(r.size()));
      for (std::size_t i = 0; i < r.size(); ++i) {
        out[2 * static_cast<Eigen::Index>(i)] = r[i].real() / v_ref;
        out[2 * static_cast<Eigen::Index>(i) + 1] = r[i].imag() / v_ref;
      }
      return out;
    };
  };
  auto admissible = [&](const Eigen::VectorXd& xx) {
    std::vector<double> vv, ee;
    double w = 0.0;
    layout.unpack(xx, vv, ee, w);
    if (!(w > 0.0)) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (!(vv[i] > 0.0) || !element::in_range(spec.models[i], ee[i])) return false;
    return true;
  };
  auto norm = [](const Eigen::VectorXd& r) { return max_norm(r); };

  Eigen::VectorXd scale(layout.size());
  for (Eigen::Index i = 0; i < layout.size(); ++i) scale[i] = 1.0;
  for (std::size_t i = 0; i < n; ++i) scale[static_cast<Eigen::Index>(i)] = v_ref;

  auto finish = [&](const Eigen::VectorXd& xx, const std::vector<int>& anchors, double rn, int its,
                    bool gap) {
    SynchronizedSolution s;
    layout.unpack(xx, s.v, s.eta, s.omega_s);
    s.phi = phi;
    s.k_vec = anchors;
    s.residual_norm = rn;
    s.iterations = its;
    s.boundary_gap = gap;
    return s;
  };

  layout.unpack(x, v, eta, omega);
  if (!admissible(x)) {
    for (std::size_t i = 0; i < n; ++i)
      if (!element::in_range(spec.models[i], eta[i]))
        throw range_error("oscillator " + std::to_string(i + 1) +
                              ": initial tuning voltage outside the model's validity range",
                          i, eta[i]);
    throw domain_error("solve_constant_phase: initial guess needs V > 0 and omega > 0");
  }

  const NewtonOptions& nopt = opts.newton;
  std::vector<std::vector<int>> history;
  double rn = INFINITY;
  std::size_t cycle_from = 0;
  bool cycled = false;
  for (int it = 0; it <= nopt.max_iterations; ++it) {
    layout.unpack(x, v, eta, omega);
    const std::vector<int> anchors = locate_anchors(spec, eta);
    const auto f = frozen(anchors);
    Eigen::VectorXd r = f(x);
    rn = norm(r);
    if (rn < nopt.tolerance) {
      for (int p = 0; p < nopt.polish_iterations && rn > 0.0; ++p) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(fd_jacobian(f, x, scale, nopt.fd_step));
        if (!lu.isInvertible()) break;
        const Eigen::VectorXd xc = x + lu.solve(-r);
        if (!admissible(xc)) break;
        std::vector<double> vc, ec;
        double wc = 0.0;
        layout.unpack(xc, vc, ec, wc);
        if (locate_anchors(spec, ec) != anchors) break;
        const Eigen::VectorXd rc = f(xc);
        if (!rc.allFinite() || !(norm(rc) < rn)) break;
        x = xc;
        r = rc;
        rn = norm(r);
      }
      return finish(x, anchors, rn, it, false);
    }
    if (it == nopt.max_iterations) break;

    const auto seen = std::find(history.begin(), history.end(), anchors);
    if (seen != history.end() && seen + 1 != history.end()) {
      cycled = true;
      cycle_from = static_cast<std::size_t>(seen - history.begin());
      break;
    }
    history.push_back(anchors);

    const Eigen::VectorXd dx = newton_direction(fd_jacobian(f, x, scale, nopt.fd_step), r, rn);
    Eigen::VectorXd xn, rnew;
    if (!damped_step(f, norm, admissible, x, r, dx, nopt.max_halvings, xn, rnew)) {
      std::ostringstream os;
      os << "solve_constant_phase: Newton step leaves the sampling range (dphi = " << dphi << ")";
      throw range_error(os.str(), spec.q, eta[spec.q]);
    }
    x = std::move(xn);
  }

  if (!cycled) {
    std::ostringstream os;
    os << "solve_constant_phase: no convergence in " << nopt.max_iterations
       << " iterations (dphi = " << dphi << ", residual " << rn << ")";
    throw numeric_error(os.str(), rn);
  }

  // The Newton path cycles through anchor sets. Solve each piece with frozen
  // anchors and move to the interval its root lands in, until a piece's root
  // lies inside its own interval or a set repeats. Failing that, keep the
  // piece whose root lies closest to its own interval.
  std::optional<SynchronizedSolution> best;
  double best_excursion = INFINITY;
  double last_residual = rn;
  std::vector<std::vector<int>> tried;
  bool hit_range = false;
  auto in_domain = [&](const Eigen::VectorXd& xx) {
    std::vector<double> vv, ee;
    double w = 0.0;
    layout.unpack(xx, vv, ee, w);
    for (std::size_t i = 0; i < n; ++i)
      if (!element::in_range(spec.models[i], ee[i])) hit_range = true;
    return admissible(xx);
  };
  for (std::size_t c = cycle_from; c < history.size(); ++c) {
    std::vector<int> anchors = history[c];
    Eigen::VectorXd from = x;
    while (std::find(tried.begin(), tried.end(), anchors) == tried.end()) {
      tried.push_back(anchors);
      NewtonResult res;
      try {
        res = damped_newton(frozen(anchors), norm, in_domain, from, scale, nopt);
      } catch (const numeric_error& e) {
        last_residual = e.residual();
        break;
      }
      std::vector<double> vv, ee;
      double w = 0.0;
      layout.unpack(res.x, vv, ee, w);
      double excursion = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (anchors[i] == no_anchor) continue;
        const auto [lo, hi] = element::anchor_domain(spec.models[i], anchors[i]);
        const double out = std::max({lo - ee[i], ee[i] - hi, 0.0});
        excursion = std::max(excursion, out / (hi - lo));
      }
      if (excursion < best_excursion) {
        best_excursion = excursion;
        best = finish(res.x, anchors, res.residual_norm, res.iterations, excursion > 0.0);
      }
      if (excursion == 0.0) return *best;
      anchors = locate_anchors(spec, ee);
      from = res.x;
    }
  }
  if (!best && hit_range) {
    std::ostringstream os;
    os << "solve_constant_phase: Newton step leaves the sampling range (dphi = " << dphi << ")";
    throw range_error(os.str(), spec.q, eta[spec.q]);
  }
  if (!best || best_excursion > opts.gap_fraction) {
    std::ostringstream os;
    os << "solve_constant_phase: piecewise anchors cycle without a consistent solution (dphi = "
       << dphi << ")";
    throw numeric_error(os.str(), best ? best->residual_norm : last_residual);
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Continuation

struct CurvePoint {
  double param = 0.0;
  std::optional<SynchronizedSolution> solution;
  std::string diagnostic;
};

struct SolutionCurve {
  std::vector<CurvePoint> points;

  std::size_t converged_count() const {
    return static_cast<std::size_t>(std::count_if(
        points.begin(), points.end(), [](const CurvePoint& p) { return p.solution.has_value(); }));
  }
};

struct SweepOptions {
  SolverOptions solver{};
  /// Smallest sub-step (as a fraction of the grid step) before a point is
  /// recorded as a gap.
  double min_step_fraction = 1.0 / 64.0;
  /// Parameter value continuation starts from; defaults to the grid point
  /// nearest zero (phase sweeps) or the first point (injection sweeps).
  std::optional<double> seed;
};

namespace detail {

inline std::vector<double> parameter_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw domain_error("sweep: step must be positive");
  if (!(stop >= start)) throw domain_error("sweep: stop must not precede start");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) grid.push_back(start + static_cast<double>(i) * step);
  if (stop - grid.back() > 1e-9 * step) grid.push_back(stop);
  return grid;
}

/// Walks from `from` (solved at p_from) to every target in order; failed
/// targets are retried with halved sub-steps before being recorded as gaps.
template <class Solve>
void march(Solve&& solve, const std::vector<double>& targets, SynchronizedSolution from,
           double p_from, double min_step, std::vector<CurvePoint>& out) {
  for (double target : targets) {
    CurvePoint pt{target, std::nullopt, {}};
    double p = p_from;
    SynchronizedSolution cur = from;
    double h = target - p;
    while (true) {
      const double next = std::abs(target - p) <= std::abs(h) ? target : p + h;
      try {
        cur = solve(next, cur);
        p = next;
        if (p == target) {
          pt.solution = cur;
          break;
        }
        h = target - p;
      } catch (const error& e) {
        h *= 0.5;
        if (std::abs(h) < min_step) {
          pt.diagnostic = e.what();
          break;
        }
      }
    }
    if (pt.solution) {
      from = *pt.solution;
      p_from = target;
    }
    out.push_back(std::move(pt));
  }
}

template <class Solve>
SolutionCurve continuation(Solve&& solve, const std::vector<double>& grid, std::size_t seed_index,
                           const SynchronizedSolution& seed_guess, double min_step) {
  SolutionCurve curve;
  const SynchronizedSolution seed = solve(grid[seed_index], seed_guess);
  std::vector<CurvePoint> backward, forward;
  std::vector<double> back_targets(grid.rbegin() + static_cast<std::ptrdiff_t>(grid.size() - seed_index),
                                   grid.rend());
  std::vector<double> fwd_targets(grid.begin() + static_cast<std::ptrdiff_t>(seed_index) + 1, grid.end());
  march(solve, back_targets, seed, grid[seed_index], min_step, backward);
  march(solve, fwd_targets, seed, grid[seed_index], min_step, forward);
  curve.points.assign(backward.rbegin(), backward.rend());
  curve.points.push_back({grid[seed_index], seed, {}});
  curve.points.insert(curve.points.end(), forward.begin(), forward.end());
  return curve;
}

inline std::size_t nearest_index(const std::vector<double>& grid, double value) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i] - value) < std::abs(grid[best] - value)) best = i;
  return best;
}

}  // namespace detail

/// Natural-parameter continuation in the phase shift over [start, stop].
inline SolutionCurve sweep_phase(const ArraySpec& spec, const InjectionSource& inj, double start,
                                 double stop, double step, const SweepOptions& opts = {}) {
  const std::vector<double> grid = detail::parameter_grid(start, stop, step);
  const std::size_t seed = detail::nearest_index(grid, opts.seed.value_or(0.0));
  auto solve = [&](double dphi, const SynchronizedSolution& guess) {
    return solve_constant_phase(spec, inj, dphi, guess, opts.solver);
  };
  return detail::continuation(solve, grid, seed, initial_guess(spec, grid[seed]),
                              opts.min_step_fraction * step);
}

/// Continuation in the injection phase theta_s over [0, 2 pi] at fixed dphi;
/// the curve is closed when the 2 pi point reproduces the 0 point.
inline SolutionCurve sweep_injection(const ArraySpec& spec, double dphi, double i_s,
                                     std::size_t theta_steps, const SweepOptions& opts = {}) {
  if (theta_steps < 2) throw domain_error("sweep_injection: need at least two theta steps");
  const double step = two_pi / static_cast<double>(theta_steps);
  std::vector<double> grid(theta_steps + 1);
  for (std::size_t i = 0; i <= theta_steps; ++i) grid[i] = step * static_cast<double>(i);
  grid.back() = two_pi;
  const SynchronizedSolution free =
      solve_constant_phase(spec, InjectionSource{}, dphi, std::nullopt, opts.solver);
  auto solve = [&](double theta, const SynchronizedSolution& guess) {
    return solve_constant_phase(spec, InjectionSource{i_s, theta}, dphi, guess, opts.solver);
  };
  const std::size_t seed = detail::nearest_index(grid, opts.seed.value_or(0.0));
  return detail::continuation(solve, grid, seed, free, opts.min_step_fraction * step);
}

/// max(omega_s) - min(omega_s) over the converged points [rad/s].
inline double locking_bandwidth(const SolutionCurve& curve) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : curve.points) {
    if (!p.solution) continue;
    lo = std::min(lo, p.solution->omega_s);
    hi = std::max(hi, p.solution->omega_s);
  }
  if (!(hi >= lo)) throw numeric_error("locking_bandwidth: curve has no converged points", INFINITY);
  return hi - lo;
}

/// Largest difference between the first and last points of a closed curve,
/// over amplitudes, tuning voltages and omega_s / omega_ref.
inline double closure_mismatch(const SolutionCurve& curve, double omega_ref) {
  const auto& a = curve.points.front().solution;
  const auto& b = curve.points.back().solution;
  if (!a || !b) return INFINITY;
  double d = std::abs(a->omega_s - b->omega_s) / omega_ref;
  for (std::size_t i = 0; i < a->v.size(); ++i) {
    d = std::max(d, std::abs(a->v[i] - b->v[i]));
    d = std::max(d, std::abs(a->eta[i] - b->eta[i]));
  }
  return d;
}

}  // namespace pwsaf
