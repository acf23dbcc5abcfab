#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include "pwsaf/error.hpp"

namespace pwsaf {

using cplx = std::complex<double>;
inline constexpr cplx j_unit{0.0, 1.0};
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Varactor

/// Abrupt/graded junction capacitance C(eta) = c_jo / (1 + eta/v_bi)^m.
struct VaractorModel {
  double c_jo;  ///< zero-bias capacitance [F]
  double m;     ///< grading exponent
  double v_bi;  ///< built-in potential [V]

  void validate() const {
    if (!(c_jo > 0.0) || !(m > 0.0) || !(v_bi > 0.0))
      throw domain_error("varactor: c_jo, m and v_bi must be positive");
  }
};

/// Capacitance at reverse bias eta >= 0. Forward bias is not modelled.
inline double varactor_capacitance(const VaractorModel& v, double eta) {
  if (!(eta >= 0.0))
    throw domain_error("varactor: tuning voltage " + std::to_string(eta) +
                       " V is in the unmodelled forward-bias region");
  return v.c_jo / std::pow(1.0 + eta / v.v_bi, v.m);
}

// ---------------------------------------------------------------------------
// Van der Pol oscillator parameters

/// Cubic active device i(v) = a v + b v^3 across a parallel L / varactor tank,
/// loaded by g_load at the output node. An optional capacitor c_out sits
/// between the tank and the output node.
struct VdpParams {
  double a;                      ///< linear conductance [S], negative
  double b;                      ///< cubic coefficient [A/V^3], positive
  double l;                      ///< tank inductance [H]
  VaractorModel varactor;
  std::optional<double> c_out;   ///< series output capacitor [F]
  double g_load;                 ///< load conductance [S]

  void validate() const {
    varactor.validate();
    if (!(a < 0.0) || !(b > 0.0) || !(l > 0.0) || !(g_load >= 0.0))
      throw domain_error("vdp: require a < 0, b > 0, l > 0, g_load >= 0");
    if (!(-a > g_load))
      throw domain_error("vdp: |a| must exceed g_load, otherwise no oscillation exists");
    if (c_out && !(*c_out > 0.0)) throw domain_error("vdp: c_out must be positive");
  }

  /// Free-running amplitude of the unloaded-by-c_out oscillator.
  double describing_function_amplitude() const {
    return std::sqrt(4.0 * (-a - g_load) / (3.0 * b));
  }

  /// Tank resonance 1/sqrt(L C(eta)).
  double resonance(double eta) const {
    return 1.0 / std::sqrt(l * varactor_capacitance(varactor, eta));
  }
};

/// Built-in potential placing the tank resonance at `f_hz` for tuning voltage
/// `eta` (closed-form inversion of the junction law).
inline double calibrate_vbi(const VdpParams& p, double eta, double f_hz) {
  const double omega = two_pi * f_hz;
  const double c_target = 1.0 / (omega * omega * p.l);
  const double ratio = p.varactor.c_jo / c_target;
  if (!(eta > 0.0) || !(ratio > 1.0))
    throw domain_error("calibrate_vbi: target frequency unreachable with this varactor");
  return eta / (std::pow(ratio, 1.0 / p.varactor.m) - 1.0);
}

/// First-harmonic admittance of the active core and tank, without g_load.
inline cplx vdp_active_admittance(const VdpParams& p, double v_core, double omega,
                                  double eta) {
  const double c = varactor_capacitance(p.varactor, eta);
  return {p.a + 0.75 * p.b * v_core * v_core, omega * c - 1.0 / (omega * p.l)};
}

/// Describing-function admittance of the core including the load:
/// (a + 3/4 b V^2 + g_load) + j(omega C(eta) - 1/(omega L)).
inline cplx vdp_core_admittance(const VdpParams& p, double v_core, double omega,
                                double eta) {
  if (!(v_core > 0.0) || !(omega > 0.0))
    throw domain_error("vdp_core_admittance: V and omega must be positive");
  return vdp_active_admittance(p, v_core, omega, eta) + p.g_load;
}

struct NodeSolveOptions {
  double tolerance = 1e-12;  ///< on V_core [V]
  int max_iterations = 100;
};

/// Amplitude across the core when the node amplitude is v_node and c_out is
/// in series: V_core = V_node |jwC / (Y_core + jwC)|. Fixed point, damped by
/// averaging when the iterate oscillates.
inline double core_voltage(const VdpParams& p, double v_node, double omega, double eta,
                           const NodeSolveOptions& opts = {}) {
  if (!p.c_out) return v_node;
  const cplx yc_out = j_unit * omega * *p.c_out;
  double v = v_node;
  double prev_step = 0.0;
  double damping = 1.0;
  double step = INFINITY;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const cplx y = vdp_active_admittance(p, v, omega, eta);
    const double target = v_node * std::abs(yc_out / (y + yc_out));
    step = target - v;
    if (prev_step != 0.0 && step * prev_step < 0.0) damping = std::max(0.25, damping * 0.5);
    v += damping * step;
    if (std::abs(step) <= 1e-15 * v_node) return v;
    prev_step = step;
  }
  if (std::abs(step) > opts.tolerance)
    throw numeric_error("node_admittance: series-capacitor amplitude did not converge",
                        std::abs(step));
  return v;
}

/// One-port admittance seen at the output node: the core (in series with
/// c_out when present) in parallel with the load.
inline cplx node_admittance(const VdpParams& p, double v_node, double omega, double eta,
                            const NodeSolveOptions& opts = {}) {
  if (!(v_node > 0.0) || !(omega > 0.0))
    throw domain_error("node_admittance: V and omega must be positive");
  if (!p.c_out) return vdp_core_admittance(p, v_node, omega, eta);
  const double vc = core_voltage(p, v_node, omega, eta, opts);
  const cplx yc = vdp_active_admittance(p, vc, omega, eta);
  const cplx yc_out = j_unit * omega * *p.c_out;
  return yc * yc_out / (yc + yc_out) + p.g_load;
}

// ---------------------------------------------------------------------------
// Injection sensitivities

/// Sensitivities of the node current to the injection phasors G_{+1}, G_{-1}.
struct InjectionSensitivity {
  cplx g1;   ///< I_G1
  cplx gm1;  ///< I_G-1

  /// From the real/imaginary-component derivatives (I_Gr, I_Gi).
  static InjectionSensitivity from_components(cplx i_gr, cplx i_gi) {
    return {0.5 * (i_gr - j_unit * i_gi), 0.5 * (i_gr + j_unit * i_gi)};
  }
  cplx i_gr() const { return g1 + gm1; }
  cplx i_gi() const { return j_unit * (g1 - gm1); }
};

// ---------------------------------------------------------------------------
// Abstract oscillator oracle

struct FreeRunningPoint {
  double v_o;
  double omega_o;
};

class OscillatorModel {
 public:
  virtual ~OscillatorModel() = default;

  virtual cplx admittance(double v, double omega, double eta) const = 0;

  /// (I_Gr, I_Gi) at the node.
  virtual std::pair<cplx, cplx> injection_components(double v, double omega,
                                                     double eta) const = 0;

  /// Re Y for V -> 0 at resonance; non-negative means no oscillation.
  virtual std::optional<double> small_signal_conductance(double /*eta*/) const {
    return std::nullopt;
  }

  /// Starting point for the free-running solve, when the model knows one.
  virtual std::optional<FreeRunningPoint> free_running_guess(double /*eta*/) const {
    return std::nullopt;
  }
};

inline InjectionSensitivity injection_phasor_derivatives(const OscillatorModel& osc,
                                                         double v, double omega,
                                                         double eta) {
  const auto [gr, gi] = osc.injection_components(v, omega, eta);
  return InjectionSensitivity::from_components(gr, gi);
}

/// Van der Pol oracle with the injection source attached at the output node.
class VanDerPolOscillator final : public OscillatorModel {
 public:
  explicit VanDerPolOscillator(VdpParams p) : p_(std::move(p)) { p_.validate(); }

  const VdpParams& params() const { return p_; }

  cplx admittance(double v, double omega, double eta) const override {
    return node_admittance(p_, v, omega, eta);
  }

  // dI/dG^r = 1 and dI/dG^i = j for a source straight into the node.
  std::pair<cplx, cplx> injection_components(double, double, double) const override {
    return {cplx{1.0, 0.0}, j_unit};
  }

  std::optional<double> small_signal_conductance(double) const override {
    return p_.a + p_.g_load;
  }

  std::optional<FreeRunningPoint> free_running_guess(double eta) const override {
    return FreeRunningPoint{p_.describing_function_amplitude(), p_.resonance(eta)};
  }

 private:
  VdpParams p_;
};

}  // namespace pwsaf
