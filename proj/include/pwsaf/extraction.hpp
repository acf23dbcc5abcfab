#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pwsaf/error.hpp"
#include "pwsaf/newton.hpp"
#include "pwsaf/oscillator.hpp"

namespace pwsaf {

// ---------------------------------------------------------------------------
// Sampling grid

struct SamplingGrid {
  std::vector<double> eta;

  static SamplingGrid uniform(double lo, double hi, std::size_t p) {
    if (p == 0) throw domain_error("sampling grid: need at least one point");
    SamplingGrid g;
    g.eta.resize(p);
    if (p == 1) {
      g.eta[0] = lo;
      return g;
    }
    for (std::size_t k = 0; k < p; ++k)
      g.eta[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(p - 1);
    g.eta.back() = hi;
    return g;
  }

  void validate() const {
    if (eta.empty()) throw domain_error("sampling grid is empty");
    for (std::size_t k = 1; k < eta.size(); ++k)
      if (!(eta[k] > eta[k - 1]))
        throw domain_error("sampling grid must be strictly increasing");
  }
};

// ---------------------------------------------------------------------------
// Samples and models

/// Free-running point plus first-order admittance data at one tuning voltage.
/// The free-running frequency is stored in hertz; omega_o() is derived, so a
/// sample written to and read back from a table is bit-identical.
struct AdmittanceSample {
  double eta_c = 0.0;
  double v_o = 0.0;
  double f_o_hz = 0.0;
  cplx y_v;
  cplx y_omega;
  cplx y_eta;
  cplx i_g1;
  cplx i_gm1;
  std::optional<std::string> warning;

  double omega_o() const { return two_pi * f_o_hz; }
  InjectionSensitivity injection() const { return {i_g1, i_gm1}; }

  bool operator==(const AdmittanceSample& o) const {
    return eta_c == o.eta_c && v_o == o.v_o && f_o_hz == o.f_o_hz && y_v == o.y_v &&
           y_omega == o.y_omega && y_eta == o.y_eta && i_g1 == o.i_g1 && i_gm1 == o.i_gm1;
  }
};

/// First-order Taylor model about the sample:
/// Y_v (V - v_o) + Y_omega (omega - omega_o) + Y_eta (eta - eta_c).
inline cplx linearized_admittance(const AdmittanceSample& s, double v, double omega,
                                  double eta) {
  return s.y_v * (v - s.v_o) + s.y_omega * (omega - s.omega_o()) + s.y_eta * (eta - s.eta_c);
}

/// Which sample a tuning voltage expands about inside its interval.
enum class Anchoring {
  left,     ///< eta_k for eta in [eta_k, eta_{k+1})
  nearest,  ///< the closer of eta_k, eta_{k+1} (ties go left)
};

/// Ordered set of samples, piecewise-linear in eta.
class PiecewiseModel {
 public:
  PiecewiseModel(std::vector<AdmittanceSample> samples, Anchoring anchoring = Anchoring::left,
                 double sanity_factor = 0.2)
      : samples_(std::move(samples)), anchoring_(anchoring) {
    if (samples_.size() < 2)
      throw domain_error("piecewise model needs p >= 2 samples; use NonPwModel for p = 1");
    for (std::size_t k = 0; k < samples_.size(); ++k) {
      const auto& s = samples_[k];
      if (!(s.v_o > 0.0) || !(s.f_o_hz > 0.0))
        throw domain_error("piecewise model: sample " + std::to_string(k) +
                           " has non-positive amplitude or frequency");
      if (k == 0) continue;
      const auto& prev = samples_[k - 1];
      if (!(s.eta_c > prev.eta_c))
        throw domain_error("piecewise model: samples must be strictly increasing in eta");
      if (std::abs(s.v_o - prev.v_o) / prev.v_o >= sanity_factor ||
          std::abs(s.f_o_hz - prev.f_o_hz) / prev.f_o_hz >= sanity_factor)
        throw domain_error("piecewise model: free-running characteristic jumps between eta = " +
                           std::to_string(prev.eta_c) + " and " + std::to_string(s.eta_c));
    }
  }

  const std::vector<AdmittanceSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  Anchoring anchoring() const { return anchoring_; }
  double eta_min() const { return samples_.front().eta_c; }
  double eta_max() const { return samples_.back().eta_c; }
  bool contains(double eta) const { return eta >= eta_min() && eta <= eta_max(); }

  /// Index k of the interval [eta_k, eta_{k+1}) holding eta; the upper end
  /// of the range maps to the last interval.
  std::size_t locate_interval(double eta) const {
    if (!contains(eta)) {
      std::ostringstream os;
      os << "tuning voltage " << eta << " V outside sampling range [" << eta_min() << ", "
         << eta_max() << "] V";
      throw range_error(os.str(), 0, eta);
    }
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), eta,
                                     [](double e, const AdmittanceSample& s) { return e < s.eta_c; });
    const auto k = static_cast<std::size_t>(std::distance(samples_.begin(), it)) - 1;
    return std::min(k, samples_.size() - 2);
  }

  /// Sample the admittance is expanded about for this eta.
  std::size_t anchor_index(double eta) const {
    const std::size_t k = locate_interval(eta);
    if (anchoring_ == Anchoring::nearest &&
        samples_[k + 1].eta_c - eta < eta - samples_[k].eta_c)
      return k + 1;
    return k;
  }

 private:
  std::vector<AdmittanceSample> samples_;
  Anchoring anchoring_;
};

/// Single-point linearization, valid (by extrapolation) for any eta.
struct NonPwModel {
  AdmittanceSample sample;
};

inline std::size_t locate_interval(const PiecewiseModel& m, double eta) {
  return m.locate_interval(eta);
}

inline cplx pw_admittance(const PiecewiseModel& m, double v, double omega, double eta) {
  return linearized_admittance(m.samples()[m.anchor_index(eta)], v, omega, eta);
}

inline cplx non_pw_admittance(const NonPwModel& m, double v, double omega, double eta) {
  return linearized_admittance(m.sample, v, omega, eta);
}

// ---------------------------------------------------------------------------
// Free-running solve

struct FreeRunningOptions {
  double tolerance = 1e-10;  ///< on |Y| [S]
  int max_iterations = 60;
  int max_halvings = 8;
};

/// Solves Y(V, omega, eta) = 0 for (V, omega) by damped Newton.
inline FreeRunningPoint solve_free_running(const OscillatorModel& osc, double eta,
                                           FreeRunningPoint guess,
                                           const FreeRunningOptions& opts = {}) {
  if (const auto g = osc.small_signal_conductance(eta); g && *g >= 0.0)
    throw numeric_error("no oscillation: small-signal net conductance is non-negative", *g);
  if (!(guess.v_o > 0.0) || !(guess.omega_o > 0.0))
    throw domain_error("solve_free_running: guess must have V > 0 and omega > 0");

  const double w0 = guess.omega_o;
  auto f = [&](const Eigen::VectorXd& x) {
    const cplx y = osc.admittance(x[0], x[1] * w0, eta);
    Eigen::VectorXd r(2);
    r << y.real(), y.imag();
    return r;
  };
  auto admissible = [](const Eigen::VectorXd& x) { return x[0] > 0.0 && x[1] > 0.0; };
  Eigen::VectorXd x(2);
  x << guess.v_o, 1.0;
  Eigen::VectorXd scale(2);
  scale << guess.v_o, 1.0;
  NewtonOptions nopt;
  nopt.tolerance = opts.tolerance;
  nopt.max_iterations = opts.max_iterations;
  nopt.max_halvings = opts.max_halvings;
  nopt.fd_step = 1e-7;
  auto euclid = [](const Eigen::VectorXd& r) { return r.norm(); };
  const NewtonResult res = damped_newton(f, euclid, admissible, x, scale, nopt);
  return {res.x[0], res.x[1] * w0};
}

inline FreeRunningPoint solve_free_running(const OscillatorModel& osc, double eta) {
  const auto g = osc.free_running_guess(eta);
  if (!g) throw domain_error("solve_free_running: model provides no initial guess");
  return solve_free_running(osc, eta, *g);
}

// ---------------------------------------------------------------------------
// Finite-difference sampling

struct DerivativeSteps {
  double v_rel = 1e-4;      ///< h_V = v_rel * v_o
  double omega_rel = 1e-6;  ///< h_omega = omega_rel * omega_o
  double eta_abs = 1e-3;    ///< h_eta [V]
  /// Relative disagreement between the h and h/2 estimates that flags a sample.
  double richardson_tolerance = 1e-4;
};

namespace detail {

/// Central difference; falls back to a second-order one-sided stencil when
/// the oracle rejects one side (e.g. eta - h in forward bias at eta = 0).
template <class F>
cplx central_difference(F&& f, double x, double h) {
  try {
    return (f(x + h) - f(x - h)) / (2.0 * h);
  } catch (const domain_error&) {
  }
  try {
    return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
  } catch (const domain_error&) {
  }
  return (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h);
}

}  // namespace detail

/// Builds the sample at a free-running point: central differences of Y in
/// V, omega and eta, plus the injection sensitivities.
inline AdmittanceSample sample_derivatives(const OscillatorModel& osc, FreeRunningPoint pt,
                                           double eta, const DerivativeSteps& steps = {}) {
  const double v = pt.v_o, w = pt.omega_o;
  auto yv = [&](double x) { return osc.admittance(x, w, eta); };
  auto yw = [&](double x) { return osc.admittance(v, x, eta); };
  auto ye = [&](double x) { return osc.admittance(v, w, x); };
  const double hv = steps.v_rel * v, hw = steps.omega_rel * w, he = steps.eta_abs;

  AdmittanceSample s;
  s.eta_c = eta;
  s.v_o = v;
  s.f_o_hz = w / two_pi;
  s.y_v = detail::central_difference(yv, v, hv);
  s.y_omega = detail::central_difference(yw, w, hw);
  s.y_eta = detail::central_difference(ye, eta, he);
  const auto inj = injection_phasor_derivatives(osc, v, w, eta);
  s.i_g1 = inj.g1;
  s.i_gm1 = inj.gm1;

  const std::pair<const char*, std::pair<cplx, cplx>> checks[] = {
      {"Y_V", {s.y_v, detail::central_difference(yv, v, 0.5 * hv)}},
      {"Y_omega", {s.y_omega, detail::central_difference(yw, w, 0.5 * hw)}},
      {"Y_eta", {s.y_eta, detail::central_difference(ye, eta, 0.5 * he)}},
  };
  for (const auto& [name, est] : checks) {
    const double scale = std::max(std::abs(est.first), std::abs(est.second));
    if (scale > 0.0 && std::abs(est.first - est.second) > steps.richardson_tolerance * scale) {
      s.warning = std::string(name) + ": finite-difference estimates with h and h/2 disagree";
      break;
    }
  }
  return s;
}

struct ExtractionOptions {
  DerivativeSteps steps;
  FreeRunningOptions solve;
  Anchoring anchoring = Anchoring::left;
  double sanity_factor = 0.2;
};

/// Samples the free-running characteristic over the grid, warm-starting each
/// point from the previous one.
inline PiecewiseModel extract_piecewise(const OscillatorModel& osc, const SamplingGrid& grid,
                                        FreeRunningPoint guess,
                                        const ExtractionOptions& opts = {}) {
  grid.validate();
  if (grid.eta.size() < 2)
    throw domain_error("extract_piecewise: a single-sample grid builds a NonPwModel instead");
  std::vector<AdmittanceSample> samples;
  samples.reserve(grid.eta.size());
  FreeRunningPoint prev = guess;
  for (double eta : grid.eta) {
    try {
      prev = solve_free_running(osc, eta, prev, opts.solve);
    } catch (const numeric_error& e) {
      std::ostringstream os;
      os << "extract_piecewise: free-running solve failed at eta = " << eta << " V: "
         << e.what();
      throw numeric_error(os.str(), e.residual());
    }
    samples.push_back(sample_derivatives(osc, prev, eta, opts.steps));
  }
  return PiecewiseModel(std::move(samples), opts.anchoring, opts.sanity_factor);
}

inline PiecewiseModel extract_piecewise(const OscillatorModel& osc, const SamplingGrid& grid,
                                        const ExtractionOptions& opts = {}) {
  grid.validate();
  const auto g = osc.free_running_guess(grid.eta.front());
  if (!g) throw domain_error("extract_piecewise: model provides no initial guess");
  return extract_piecewise(osc, grid, *g, opts);
}

inline NonPwModel extract_non_pw(const OscillatorModel& osc, double eta_c,
                                 FreeRunningPoint guess, const ExtractionOptions& opts = {}) {
  const FreeRunningPoint pt = solve_free_running(osc, eta_c, guess, opts.solve);
  return {sample_derivatives(osc, pt, eta_c, opts.steps)};
}

inline NonPwModel extract_non_pw(const OscillatorModel& osc, double eta_c,
                                 const ExtractionOptions& opts = {}) {
  const auto g = osc.free_running_guess(eta_c);
  if (!g) throw domain_error("extract_non_pw: model provides no initial guess");
  return extract_non_pw(osc, eta_c, *g, opts);
}

}  // namespace pwsaf
