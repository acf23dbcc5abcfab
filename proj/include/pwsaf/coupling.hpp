#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

#include "pwsaf/error.hpp"
#include "pwsaf/oscillator.hpp"

namespace pwsaf {

/// How r_s, r_p and the line are interconnected between two oscillator nodes.
enum class CouplingTopology {
  /// r_s at each port in series, line loaded by r_p to ground at both ends.
  /// Default: light enough that an r_p = 300 ohm network does not quench the
  /// oscillators.
  loaded_line,
  /// Shunt r_p at each port, r_s in series with the line (half on each side).
  pi,
};

struct CouplingParams {
  double z_o;    ///< line characteristic impedance [ohm]
  double psi_o;  ///< electrical length at f_ref [rad]
  double f_ref;  ///< reference frequency [Hz]
  double r_s;    ///< series resistance [ohm]
  double r_p;    ///< shunt resistance [ohm]
  CouplingTopology topology = CouplingTopology::loaded_line;

  void validate() const {
    if (!(z_o > 0.0) || !(psi_o > 0.0) || !(f_ref > 0.0) || !(r_s > 0.0) || !(r_p > 0.0))
      throw domain_error("coupling: all parameters must be positive");
  }
  double omega_ref() const { return two_pi * f_ref; }
};

/// Y-parameters of a symmetric reciprocal two-port (Y22 = Y11, Y21 = Y12).
struct TwoPortY {
  cplx y11;
  cplx y12;
};

namespace detail {

using Abcd = Eigen::Matrix2cd;

inline Abcd series(cplx z) {
  Abcd m;
  m << 1.0, z, 0.0, 1.0;
  return m;
}

inline Abcd shunt(cplx y) {
  Abcd m;
  m << 1.0, 0.0, y, 1.0;
  return m;
}

inline Abcd line(double z_o, double psi) {
  Abcd m;
  m << std::cos(psi), j_unit * z_o * std::sin(psi), j_unit * std::sin(psi) / z_o,
      std::cos(psi);
  return m;
}

}  // namespace detail

/// Two-port admittance of the coupling network at omega. The network is
/// cascaded in ABCD form, so the lossless line never needs its own
/// (singular at psi = k pi) Y-matrix.
inline TwoPortY coupling_two_port(const CouplingParams& cp, double omega) {
  if (!(omega > 0.0)) throw domain_error("coupling_two_port: omega must be positive");
  const double psi = cp.psi_o * omega / cp.omega_ref();
  const auto tl = detail::line(cp.z_o, psi);
  detail::Abcd net;
  switch (cp.topology) {
    case CouplingTopology::loaded_line:
      net = detail::series(cp.r_s) * detail::shunt(1.0 / cp.r_p) * tl *
            detail::shunt(1.0 / cp.r_p) * detail::series(cp.r_s);
      break;
    case CouplingTopology::pi:
      // r_s split around the line keeps the network symmetric off f_ref.
      net = detail::shunt(1.0 / cp.r_p) * detail::series(0.5 * cp.r_s) * tl *
            detail::series(0.5 * cp.r_s) * detail::shunt(1.0 / cp.r_p);
      break;
  }
  const cplx b = net(0, 1), d = net(1, 1);
  if (std::abs(b) == 0.0) throw domain_error("coupling_two_port: network has no Y-matrix");
  // Y11 = D/B, Y12 = -det/B with det = 1 for a reciprocal network.
  const cplx det = net.determinant();
  return {d / b, -det / b};
}

/// Tridiagonal N x N coupling matrix: Y12 off the diagonal, 2 Y11 on it (edge
/// oscillators get their second Y11 from the symmetry load).
inline Eigen::MatrixXcd coupling_matrix(const CouplingParams& cp, int n, double omega) {
  if (n < 2) throw domain_error("coupling_matrix: need at least two oscillators");
  const TwoPortY y = coupling_two_port(cp, omega);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    c(i, i) = 2.0 * y.y11;
    if (i + 1 < n) {
      c(i, i + 1) = y.y12;
      c(i + 1, i) = y.y12;
    }
  }
  return c;
}

}  // namespace pwsaf
