#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "pwsaf/pwsaf.hpp"

// Van der Pol testbed: device, tank, varactor and coupling values of the
// three-element array, v_bi calibrated to 5.2 GHz at 2.5 V.
namespace testbed {

using namespace pwsaf;

inline VdpParams vdp(std::optional<double> c_out = std::nullopt) {
  VdpParams p{-0.023, 0.01, 1.53e-9, {0.72e-12, 0.5, 1.0}, c_out, 1.0 / 50.0};
  p.varactor.v_bi = calibrate_vbi(p, 2.5, 5.2e9);
  return p;
}

inline std::shared_ptr<const VanDerPolOscillator> oscillator(std::optional<double> c_out = std::nullopt) {
  return std::make_shared<VanDerPolOscillator>(vdp(c_out));
}

inline CouplingParams coupling() { return {50.0, two_pi, 5.2e9, 1250.0, 300.0}; }

using Oscillators = std::vector<std::shared_ptr<const OscillatorModel>>;

inline Oscillators identical() {
  auto o = oscillator();
  return {o, o, o};
}

inline Oscillators asymmetric() {
  return {oscillator(10e-12), oscillator(), oscillator(9.65e-12)};
}

inline ArraySpec base_spec(std::size_t n = 3) {
  ArraySpec s;
  s.coupling = coupling();
  s.q = n / 2;
  s.eta_q = 2.5;
  return s;
}

inline ArraySpec pw_spec(const Oscillators& osc, const SamplingGrid& grid,
                         Anchoring anchoring = Anchoring::left) {
  ArraySpec s = base_spec(osc.size());
  ExtractionOptions xo;
  xo.anchoring = anchoring;
  for (const auto& o : osc) s.models.emplace_back(extract_piecewise(*o, grid, xo));
  return s;
}

inline ArraySpec pw_spec(const Oscillators& osc, std::size_t p = 33) {
  return pw_spec(osc, SamplingGrid::uniform(2.4, 4.0, p));
}

inline ArraySpec non_pw_spec(const Oscillators& osc, double eta_c = 2.5) {
  ArraySpec s = base_spec(osc.size());
  for (const auto& o : osc) s.models.emplace_back(extract_non_pw(*o, eta_c));
  return s;
}

inline ArraySpec exact_spec(const Oscillators& osc) {
  ArraySpec s = base_spec(osc.size());
  return oracle_spec(s, osc);
}

}  // namespace testbed
