#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace pwsaf;

namespace {

// Tank resonance as a function of v_bi, written out independently of the
// library's closed-form inversion.
double resonance_hz(double v_bi, double eta) {
  const double c = 0.72e-12 / std::sqrt(1.0 + eta / v_bi);
  return 1.0 / (two_pi * std::sqrt(1.53e-9 * c));
}

double bisect_vbi(double eta, double f_target) {
  double lo = 0.1, hi = 1000.0;  // f_o decreases as v_bi grows
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (resonance_hz(mid, eta) > f_target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Varactor, ZeroBiasGivesCjo) {
  const VaractorModel v{0.72e-12, 0.5, 3.7};
  EXPECT_DOUBLE_EQ(varactor_capacitance(v, 0.0), 0.72e-12);
}

TEST(Varactor, SquareRootLaw) {
  const VaractorModel v{0.72e-12, 0.5, 1.0};
  EXPECT_NEAR(varactor_capacitance(v, 3.0), 0.36e-12, 1e-27);
}

TEST(Varactor, ForwardBiasRejected) {
  const VaractorModel v{0.72e-12, 0.5, 1.0};
  EXPECT_THROW(varactor_capacitance(v, -0.1), domain_error);
}

TEST(Varactor, StrictlyDecreasing) {
  const VaractorModel v{0.72e-12, 0.5, 6.5};
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> eta(0.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const double a = eta(rng), b = a + 1e-3 + eta(rng);
    EXPECT_GT(varactor_capacitance(v, a), varactor_capacitance(v, b));
  }
}

TEST(Varactor, InvalidParametersRejected) {
  EXPECT_THROW((VaractorModel{0.0, 0.5, 1.0}.validate()), domain_error);
  EXPECT_THROW((VaractorModel{1e-12, -0.5, 1.0}.validate()), domain_error);
  EXPECT_THROW((VaractorModel{1e-12, 0.5, 0.0}.validate()), domain_error);
}

TEST(Calibration, MatchesBisectionOracle) {
  const VdpParams p = testbed::vdp();
  const double expected = bisect_vbi(2.5, 5.2e9);
  EXPECT_NEAR(p.varactor.v_bi, expected, 1e-9 * expected);
  EXPECT_NEAR(p.resonance(2.5) / two_pi, 5.2e9, 1e-3);
}

TEST(VdpParams, RejectsQuenchedOscillator) {
  VdpParams p = testbed::vdp();
  p.g_load = 0.03;  // |a| = 0.023 < g_load
  EXPECT_THROW(p.validate(), domain_error);
  EXPECT_THROW(VanDerPolOscillator{p}, domain_error);
  p.g_load = 0.023;
  EXPECT_THROW(p.validate(), domain_error);
}

TEST(CoreAdmittance, VanishesAtDescribingFunctionPoint) {
  const VdpParams p = testbed::vdp();
  const double w = p.resonance(2.5);
  const cplx y = vdp_core_admittance(p, std::sqrt(0.4), w, 2.5);
  EXPECT_NEAR(y.real(), 0.0, 1e-15);
  EXPECT_NEAR(y.imag(), 0.0, 1e-15);
}

TEST(CoreAdmittance, SmallSignalLimit) {
  const VdpParams p = testbed::vdp();
  const cplx y = vdp_core_admittance(p, 1e-9, p.resonance(3.0), 3.0);
  EXPECT_NEAR(y.real(), -0.003, 1e-15);
  EXPECT_NEAR(y.imag(), 0.0, 1e-15);
}

TEST(CoreAdmittance, ImaginaryPartIncreasesWithFrequency) {
  const VdpParams p = testbed::vdp();
  double prev = -INFINITY;
  for (double f = 4e9; f < 6.5e9; f += 1e7) {
    const double im = vdp_core_admittance(p, 0.5, two_pi * f, 2.5).imag();
    EXPECT_GT(im, prev);
    prev = im;
  }
}

TEST(CoreAdmittance, RejectsNonPositiveArguments) {
  const VdpParams p = testbed::vdp();
  EXPECT_THROW(vdp_core_admittance(p, 0.0, 1e10, 2.5), domain_error);
  EXPECT_THROW(vdp_core_admittance(p, 0.5, 0.0, 2.5), domain_error);
}

// First Fourier coefficient of i(V cos t) by trapezoidal quadrature, which is
// exact (to rounding) for trigonometric polynomials of low degree.
TEST(CoreAdmittance, DescribingFunctionMatchesFourierIntegral) {
  const VdpParams p = testbed::vdp();
  const int n = 512;
  for (double v : {0.05, 0.3, 0.632, 1.0, 2.5}) {
    double c1 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t = two_pi * k / n;
      const double x = v * std::cos(t);
      c1 += (p.a * x + p.b * x * x * x) * std::cos(t);
    }
    c1 *= 2.0 / n;
    const double g = vdp_active_admittance(p, v, 3e10, 2.5).real();
    EXPECT_NEAR(g * v, c1, 1e-10 * std::abs(c1)) << "V = " << v;
  }
}

TEST(NodeAdmittance, NoSeriesCapacitorIsCoreAdmittance) {
  const VdpParams p = testbed::vdp();
  for (double v : {0.2, 0.6, 0.9})
    for (double eta : {0.5, 2.5, 4.0}) {
      const double w = two_pi * 5.1e9;
      EXPECT_EQ(node_admittance(p, v, w, eta), vdp_core_admittance(p, v, w, eta));
    }
}

TEST(NodeAdmittance, HugeSeriesCapacitorIsTransparent) {
  const VdpParams bare = testbed::vdp();
  VdpParams p = bare;
  p.c_out = 1.0;
  const double w = two_pi * 5.2e9;
  for (double v : {0.3, 0.63}) {
    const cplx a = node_admittance(p, v, w, 2.5), b = vdp_core_admittance(bare, v, w, 2.5);
    EXPECT_LT(std::abs(a - b), 1e-6 * std::abs(b) + 1e-15);
  }
}

TEST(NodeAdmittance, SeriesCapacitorShiftsFreeRunningPoint) {
  const auto bare = testbed::oscillator();
  const auto loaded = testbed::oscillator(10e-12);
  const auto a = solve_free_running(*bare, 2.5);
  const auto b = solve_free_running(*loaded, 2.5);
  EXPECT_LT(b.omega_o, a.omega_o - two_pi * 50e6);  // tens of MHz lower
  EXPECT_LT(std::abs(loaded->admittance(b.v_o, b.omega_o, 2.5)), 1e-10);
}

TEST(NodeAdmittance, InnerAmplitudeSatisfiesItsDefinition) {
  VdpParams p = testbed::vdp(10e-12);
  const double w = two_pi * 5.0e9, vn = 0.6;
  const double vc = core_voltage(p, vn, w, 3.0);
  const cplx yc = vdp_active_admittance(p, vc, w, 3.0);
  const cplx yo = j_unit * w * *p.c_out;
  EXPECT_NEAR(vc, vn * std::abs(yo / (yc + yo)), 1e-12);
}

TEST(Injection, VanDerPolDirectNode) {
  const auto osc = testbed::oscillator();
  const auto s = injection_phasor_derivatives(*osc, 0.6, 3e10, 2.5);
  EXPECT_EQ(s.g1, cplx(1.0, 0.0));
  EXPECT_EQ(s.gm1, cplx(0.0, 0.0));
}

TEST(Injection, ChainRuleRoundTrip) {
  std::mt19937 rng(5);
  std::normal_distribution<double> d;
  for (int i = 0; i < 100; ++i) {
    const cplx gr{d(rng), d(rng)}, gi{d(rng), d(rng)};
    const auto s = InjectionSensitivity::from_components(gr, gi);
    EXPECT_LT(std::abs(s.g1 + s.gm1 - gr), 1e-15 * (1 + std::abs(gr)));
    EXPECT_LT(std::abs(j_unit * (s.g1 - s.gm1) - gi), 1e-15 * (1 + std::abs(gi)));
  }
  const auto s = InjectionSensitivity::from_components(cplx{0.8, 0.0}, cplx{0.0, 1.1});
  EXPECT_NEAR(s.g1.real(), 0.5 * (0.8 + 1.1), 1e-15);
  EXPECT_NEAR(s.gm1.real(), 0.5 * (0.8 - 1.1), 1e-15);
}
