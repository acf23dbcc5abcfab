#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "pwsaf/array_solver.hpp"
#include "pwsaf/error.hpp"

namespace pwsaf {

/// Same array with every element replaced by its nonlinear oracle (a spec
/// without models just supplies coupling, q and eta_q).
inline ArraySpec oracle_spec(const ArraySpec& spec,
                             const std::vector<std::shared_ptr<const OscillatorModel>>& oscillators,
                             double eta_min = 0.0,
                             double eta_max = std::numeric_limits<double>::infinity()) {
  if (!spec.models.empty() && oscillators.size() != spec.size())
    throw domain_error("oracle_spec: one oscillator per array element required");
  ArraySpec out = spec;
  out.models.clear();
  for (const auto& o : oscillators) out.models.emplace_back(OracleElement{o, eta_min, eta_max});
  return out;
}

/// Solves the exact first-harmonic system: the coupled equations with every
/// admittance taken from the oracle rather than a Taylor model.
inline SynchronizedSolution exact_sync_solve(const ArraySpec& spec, const InjectionSource& inj,
                                             double dphi,
                                             const std::optional<SynchronizedSolution>& guess,
                                             const SolverOptions& opts = {}) {
  for (const auto& m : spec.models)
    if (!std::holds_alternative<OracleElement>(m))
      throw domain_error("exact_sync_solve: every element must be an oracle");
  return solve_constant_phase(spec, inj, dphi, guess, opts);
}

struct CurveComparison {
  double max_abs_eta_error = 0.0;   ///< [V]
  double rms_eta_error = 0.0;       ///< [V]
  double max_rel_freq_error = 0.0;  ///< relative to curve b
  std::size_t count = 0;
};

namespace detail {

struct Sampled {
  std::vector<double> eta;
  double omega;
};

/// Linear interpolation of a curve at x; nullopt when x falls outside the
/// converged points or across a gap.
inline std::optional<Sampled> interpolate(const SolutionCurve& c, double x) {
  const auto& p = c.points;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p[i].solution) continue;
    if (p[i].param == x) return Sampled{p[i].solution->eta, p[i].solution->omega_s};
    if (i + 1 < p.size() && p[i + 1].solution && p[i].param < x && x < p[i + 1].param) {
      const double t = (x - p[i].param) / (p[i + 1].param - p[i].param);
      const auto& a = *p[i].solution;
      const auto& b = *p[i + 1].solution;
      Sampled s{a.eta, (1 - t) * a.omega_s + t * b.omega_s};
      for (std::size_t k = 0; k < s.eta.size(); ++k) s.eta[k] = (1 - t) * a.eta[k] + t * b.eta[k];
      return s;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Error metrics between two curves over their common converged domain,
/// optionally clipped to `window`. Both curves are evaluated (linearly
/// interpolated) at the union of their sweep parameters.
inline CurveComparison compare_curves(const SolutionCurve& a, const SolutionCurve& b,
                                      std::optional<std::pair<double, double>> window = {}) {
  std::vector<double> xs;
  for (const auto* c : {&a, &b})
    for (const auto& p : c->points)
      if (p.solution) xs.push_back(p.param);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  CurveComparison r;
  double sum_sq = 0.0;
  std::size_t terms = 0;
  for (double x : xs) {
    if (window && (x < window->first || x > window->second)) continue;
    const auto sa = detail::interpolate(a, x);
    const auto sb = detail::interpolate(b, x);
    if (!sa || !sb) continue;
    if (sa->eta.size() != sb->eta.size())
      throw domain_error("compare_curves: curves have different oscillator counts");
    for (std::size_t k = 0; k < sa->eta.size(); ++k) {
      const double e = std::abs(sa->eta[k] - sb->eta[k]);
      r.max_abs_eta_error = std::max(r.max_abs_eta_error, e);
      sum_sq += e * e;
      ++terms;
    }
    r.max_rel_freq_error =
        std::max(r.max_rel_freq_error, std::abs(sa->omega - sb->omega) / std::abs(sb->omega));
    ++r.count;
  }
  if (r.count == 0) throw domain_error("compare_curves: curves do not overlap");
  r.rms_eta_error = std::sqrt(sum_sq / static_cast<double>(terms));
  return r;
}

/// [first, last] converged sweep parameter.
inline std::pair<double, double> converged_span(const SolutionCurve& c) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : c.points)
    if (p.solution) {
      lo = std::min(lo, p.param);
      hi = std::max(hi, p.param);
    }
  if (!(hi >= lo)) throw domain_error("converged_span: curve has no converged points");
  return {lo, hi};
}

/// max |d_eta_first + d_eta_last| over converged points, deviations taken
/// from eta_center, optionally restricted to `window`. Zero for a curve whose
/// outer oscillators detune in exact opposition.
inline double antisymmetry_error(const SolutionCurve& c, double eta_center,
                                 std::optional<std::pair<double, double>> window = {}) {
  double worst = 0.0;
  for (const auto& p : c.points)
    if (p.solution && (!window || (p.param >= window->first && p.param <= window->second))) {
      const auto& e = p.solution->eta;
      worst = std::max(worst, std::abs((e.front() - eta_center) + (e.back() - eta_center)));
    }
  return worst;
}

}  // namespace pwsaf
