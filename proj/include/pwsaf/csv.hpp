#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pwsaf/array_solver.hpp"
#include "pwsaf/stability.hpp"
#include "pwsaf/validation.hpp"

namespace pwsaf {

// Plot-ready CSV output: 12 significant digits, '.' decimal point, '\n' line
// endings, so reruns on the same input are byte-identical. Piecewise indices
// are written one-based (k = 1 is the interval starting at the first sample).

namespace detail {

inline std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace detail

inline void write_sweep_header(std::ostream& os, std::size_t n) {
  os << "sweep_param,omega_s_hz";
  for (std::size_t i = 1; i <= n; ++i)
    os << ",v_" << i << ",phi_" << i << "_rad,eta_" << i << ",k_" << i;
  os << ",residual_norm,converged,model\n";
}

inline void write_sweep_row(std::ostream& os, double param, const SynchronizedSolution& s,
                            std::string_view model) {
  using detail::fmt12;
  os << fmt12(param) << ',' << fmt12(s.omega_s / two_pi);
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    const int k = s.k_vec.empty() || s.k_vec[i] == no_anchor ? 0 : s.k_vec[i] + 1;
    os << ',' << fmt12(s.v[i]) << ',' << fmt12(s.phi[i]) << ',' << fmt12(s.eta[i]) << ',' << k;
  }
  os << ',' << fmt12(s.residual_norm) << ",1," << model << '\n';
}

/// One row per converged point.
inline void write_sweep_csv(std::ostream& os, const SolutionCurve& curve, std::size_t n,
                            std::string_view model) {
  write_sweep_header(os, n);
  for (const auto& p : curve.points)
    if (p.solution) write_sweep_row(os, p.param, *p.solution, model);
}

inline void write_stability_trace_csv(std::ostream& os, const std::vector<StabilityTracePoint>& trace,
                                      std::size_t n) {
  using detail::fmt12;
  os << "dphi_rad";
  for (std::size_t i = 1; i <= 2 * n; ++i) os << ",lambda_" << i << "_re,lambda_" << i << "_im";
  os << ",stable\n";
  for (const auto& t : trace) {
    os << fmt12(t.dphi);
    for (const cplx& l : t.result.eigenvalues) os << ',' << fmt12(l.real()) << ',' << fmt12(l.imag());
    os << ',' << (t.result.stable ? 1 : 0) << '\n';
  }
}

inline void write_intervals_csv(std::ostream& os, const std::vector<StableInterval>& intervals) {
  using detail::fmt12;
  os << "lo_rad,hi_rad,lo_refined,hi_refined\n";
  for (const auto& iv : intervals)
    os << fmt12(iv.lo) << ',' << fmt12(iv.hi) << ',' << (iv.lo_refined ? 1 : 0) << ','
       << (iv.hi_refined ? 1 : 0) << '\n';
}

inline void write_comparison_header(std::ostream& os) {
  os << "model,reference,max_abs_eta_error_v,rms_eta_error_v,max_rel_freq_error,count\n";
}

inline void write_comparison_row(std::ostream& os, std::string_view model,
                                 std::string_view reference, const CurveComparison& c) {
  using detail::fmt12;
  os << model << ',' << reference << ',' << fmt12(c.max_abs_eta_error) << ','
     << fmt12(c.rms_eta_error) << ',' << fmt12(c.max_rel_freq_error) << ',' << c.count << '\n';
}

}  // namespace pwsaf
