#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace pwsaf;

namespace {

const InjectionSource none{};

double scaled_residual(const ArraySpec& spec, const InjectionSource& inj, const SynchronizedSolution& s) {
  return residual_norm(spec, assemble_residual(spec, inj, s));
}

}  // namespace

TEST(ConstantShift, PhasesReferencedToQ) {
  const auto p = constant_shift_phases(4, 1, 0.3);
  EXPECT_DOUBLE_EQ(p[0], -0.3);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[3], 0.6);
}

TEST(ArraySpec, Validation) {
  auto spec = testbed::pw_spec(testbed::identical());
  EXPECT_NO_THROW(spec.validate());
  auto bad = spec;
  bad.q = 3;
  EXPECT_THROW(bad.validate(), domain_error);
  bad = spec;
  bad.eta_q = 4.5;
  EXPECT_THROW(bad.validate(), range_error);
  bad = spec;
  bad.models.erase(bad.models.begin() + 1, bad.models.end());
  bad.q = 0;
  EXPECT_THROW(bad.validate(), domain_error);
}

TEST(LocateAnchors, NamesTheOffendingOscillator) {
  const auto spec = testbed::pw_spec(testbed::identical());
  try {
    locate_anchors(spec, {2.5, 4.2, 2.5});
    FAIL();
  } catch (const range_error& e) {
    EXPECT_EQ(e.oscillator(), 1u);
    EXPECT_DOUBLE_EQ(e.eta(), 4.2);
    EXPECT_NE(std::string(e.what()).find("oscillator 2"), std::string::npos);
  }
}

TEST(Solve, ZeroShiftKeepsIdenticalArrayAtReference) {
  const auto spec = testbed::pw_spec(testbed::identical());
  const auto s = solve_constant_phase(spec, none, 0.0, std::nullopt);
  for (double e : s.eta) EXPECT_NEAR(e, 2.5, 1e-9);
  EXPECT_NEAR(s.v[0], s.v[2], 1e-9);  // edges see one neighbour, the centre two
  EXPECT_EQ(s.phi[1], 0.0);
  EXPECT_LE(s.residual_norm, 1e-9);
  EXPECT_FALSE(s.boundary_gap);
}

TEST(Solve, ResidualAndAnchorsConsistent) {
  for (const auto& osc : {testbed::identical(), testbed::asymmetric()}) {
    const auto spec = testbed::pw_spec(osc);
    for (double dphi : {-1.2, -0.4, 0.3}) {
      const auto s = solve_constant_phase(spec, none, dphi, std::nullopt);
      EXPECT_LE(scaled_residual(spec, none, s), 1e-9) << dphi;
      if (!s.boundary_gap) {
        EXPECT_EQ(s.k_vec, locate_anchors(spec, s.eta)) << dphi;
      }
      for (std::size_t i = 0; i < 3; ++i)
        EXPECT_NEAR(s.phi[i], (static_cast<double>(i) - 1.0) * dphi, 1e-15);
    }
  }
}

TEST(Solve, MirrorSymmetryOfIdenticalArray) {
  const auto spec = testbed::exact_spec(testbed::identical());
  for (double dphi : {0.2, 0.7, 1.3}) {
    const auto a = solve_constant_phase(spec, none, dphi, std::nullopt);
    const auto b = solve_constant_phase(spec, none, -dphi, std::nullopt);
    EXPECT_NEAR(a.eta[0], b.eta[2], 1e-8);
    EXPECT_NEAR(a.eta[2], b.eta[0], 1e-8);
    EXPECT_NEAR(a.v[0], b.v[2], 1e-8);
    EXPECT_NEAR(a.omega_s, b.omega_s, 1e-8 * a.omega_s);
  }
}

TEST(Solve, Idempotent) {
  const auto spec = testbed::pw_spec(testbed::asymmetric());
  const auto a = solve_constant_phase(spec, none, -0.8, std::nullopt);
  const auto b = solve_constant_phase(spec, none, -0.8, a);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(a.eta[i], b.eta[i], 1e-10);
    EXPECT_NEAR(a.v[i], b.v[i], 1e-10);
  }
  EXPECT_NEAR(a.omega_s, b.omega_s, 1e-10 * a.omega_s);
  EXPECT_EQ(a.k_vec, b.k_vec);
}

TEST(Residual, InvariantUnderCommonPhaseRotation) {
  const auto spec = testbed::pw_spec(testbed::asymmetric());
  auto s = solve_constant_phase(spec, none, -0.6, std::nullopt);
  s.eta[0] += 0.013;  // move off the solution so the residual is not ~0
  s.v[2] *= 1.02;
  const auto r0 = assemble_residual(spec, none, s);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> alpha(-10.0, 10.0);
  for (int t = 0; t < 20; ++t) {
    auto rot = s;
    const double a = alpha(rng);
    for (double& p : rot.phi) p += a;
    const auto r1 = assemble_residual(spec, none, rot);
    EXPECT_LT((r1 - r0).cwiseAbs().maxCoeff(), 1e-13 * r0.cwiseAbs().maxCoeff());
  }
}

TEST(Residual, InjectionRotatesWithTheSource) {
  // Rotating the phases and theta_s together leaves the injected residual unchanged.
  const auto spec = testbed::pw_spec(testbed::identical());
  auto s = solve_constant_phase(spec, none, 0.4, std::nullopt);
  const InjectionSource inj{5e-4, 0.3};
  const auto r0 = assemble_residual(spec, inj, s);
  for (double& p : s.phi) p += 1.1;
  const auto r1 = assemble_residual(spec, InjectionSource{5e-4, 1.4}, s);
  EXPECT_LT((r1 - r0).cwiseAbs().maxCoeff(), 1e-13 * r0.cwiseAbs().maxCoeff());
}

TEST(Solve, DecoupledLimitMatchesFreeRunningFrequencies) {
  auto spec = testbed::exact_spec(testbed::asymmetric());
  spec.coupling.r_s *= 1e4;
  spec.coupling.r_p *= 1e4;
  const auto s = solve_constant_phase(spec, none, 0.5, std::nullopt);
  const auto osc = testbed::asymmetric();
  for (std::size_t i = 0; i < 3; ++i) {
    const auto fr = solve_free_running(*osc[i], s.eta[i]);
    EXPECT_NEAR(fr.omega_o, s.omega_s, 1e-6 * s.omega_s) << i;
    EXPECT_NEAR(fr.v_o, s.v[i], 1e-3 * fr.v_o) << i;
  }
  EXPECT_NEAR(s.eta[1], 2.5, 1e-12);
}

TEST(Solve, FiveElementArray) {
  testbed::Oscillators osc(5, testbed::oscillator());
  auto spec = testbed::pw_spec(osc);
  ASSERT_EQ(spec.q, 2u);
  const auto a = solve_constant_phase(spec, none, 0.3, std::nullopt);
  const auto b = solve_constant_phase(spec, none, -0.3, std::nullopt);
  EXPECT_LE(a.residual_norm, 1e-9);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(a.eta[i], b.eta[4 - i], 1e-8) << i;
  EXPECT_NE(a.eta[0], a.eta[4]);
}

TEST(Solve, OutOfRangeIsReported) {
  const auto spec = testbed::pw_spec(testbed::identical(), SamplingGrid::uniform(2.45, 2.55, 5));
  EXPECT_THROW(solve_constant_phase(spec, none, 1.5, std::nullopt), error);
}

TEST(Solve, InjectedStateBeyondGridIsARangeError) {
  // Injection at theta_s = 0.8 pulls eta_3 below 2.4 V; the wide grid holds it.
  const InjectionSource inj{2e-4, 0.8};
  const auto narrow = testbed::pw_spec(testbed::identical());
  const auto free = solve_constant_phase(narrow, none, -1.0, std::nullopt);
  EXPECT_THROW(solve_constant_phase(narrow, inj, -1.0, free), range_error);
  const auto wide = testbed::pw_spec(testbed::identical(), SamplingGrid::uniform(0.0, 7.0, 141));
  const auto s = solve_constant_phase(wide, inj, -1.0, solve_constant_phase(wide, none, -1.0, std::nullopt));
  EXPECT_LT(s.eta[2], 2.4);
  EXPECT_FALSE(s.boundary_gap);
  EXPECT_LT(scaled_residual(wide, inj, s), 1e-9);
}

TEST(Sweep, IdenticalCurveIsMirrorSymmetric) {
  const auto spec = testbed::pw_spec(testbed::identical());
  const auto c = sweep_phase(spec, none, -1.5, 1.5, 0.1);
  ASSERT_EQ(c.points.size(), 31u);
  ASSERT_EQ(c.converged_count(), 31u);
  for (std::size_t i = 0; i < 31; ++i) {
    const auto& a = *c.points[i].solution;
    const auto& b = *c.points[30 - i].solution;
    EXPECT_NEAR(c.points[i].param, -c.points[30 - i].param, 1e-12);
    EXPECT_NEAR(a.eta[0], b.eta[2], 1e-8);
    EXPECT_NEAR(a.omega_s, b.omega_s, 1e-9 * a.omega_s);
  }
}

TEST(Sweep, OuterTuningMonotonicInShift) {
  const auto spec = testbed::exact_spec(testbed::identical());
  const auto c = sweep_phase(spec, none, -1.5, 1.5, 0.1);
  ASSERT_EQ(c.converged_count(), c.points.size());
  const double sign = c.points.back().solution->eta[0] > c.points.front().solution->eta[0] ? 1 : -1;
  for (std::size_t i = 1; i < c.points.size(); ++i)
    EXPECT_GT(sign * (c.points[i].solution->eta[0] - c.points[i - 1].solution->eta[0]), 0.0);
}

TEST(Sweep, SeedPointIsNearestZero) {
  const auto g = detail::parameter_grid(-1.0, 1.0, 0.3);
  EXPECT_EQ(g.size(), 8u);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  EXPECT_EQ(detail::nearest_index(g, 0.0), 3u);
  EXPECT_THROW(detail::parameter_grid(0.0, 1.0, 0.0), domain_error);
  EXPECT_THROW(detail::parameter_grid(1.0, 0.0, 0.1), domain_error);
}

TEST(Sweep, CoarseStepsRecoveredBySubstepping) {
  const auto spec = testbed::pw_spec(testbed::identical());
  const auto fine = sweep_phase(spec, none, -1.5, 1.5, 0.05);
  const auto coarse = sweep_phase(spec, none, -1.5, 1.5, 0.75);
  ASSERT_EQ(coarse.converged_count(), coarse.points.size());
  for (const auto& p : coarse.points) {
    const auto* match = &fine.points.front();
    for (const auto& f : fine.points)
      if (std::abs(f.param - p.param) < 1e-9) match = &f;
    ASSERT_NEAR(match->param, p.param, 1e-9);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(match->solution->eta[i], p.solution->eta[i], 1e-8);
  }
}

TEST(Sweep, GapsCarryDiagnostics) {
  const auto spec = testbed::pw_spec(testbed::identical(), SamplingGrid::uniform(2.45, 2.55, 5));
  const auto c = sweep_phase(spec, none, -2.0, 2.0, 0.1);
  EXPECT_GT(c.converged_count(), 0u);
  EXPECT_LT(c.converged_count(), c.points.size());
  for (const auto& p : c.points)
    if (!p.solution) {
      EXPECT_FALSE(p.diagnostic.empty());
    }
  const auto [lo, hi] = converged_span(c);
  EXPECT_LE(lo, 0.0);
  EXPECT_GE(hi, 0.0);
}

class InjectionSweep : public ::testing::Test {
 protected:
  static ArraySpec spec() {
    return testbed::pw_spec(testbed::identical(), SamplingGrid::uniform(0.0, 7.0, 141));
  }
};

TEST_F(InjectionSweep, ZeroCurrentLeavesFrequencyUnchanged) {
  const auto s = spec();
  const auto c = sweep_injection(s, 0.5, 0.0, 12);
  ASSERT_EQ(c.converged_count(), 13u);
  const double w0 = c.points.front().solution->omega_s;
  for (const auto& p : c.points) EXPECT_NEAR(p.solution->omega_s, w0, 1e-12 * w0);
  EXPECT_LT(closure_mismatch(c, s.coupling.omega_ref()), 1e-9);
}

TEST_F(InjectionSweep, ClosedCurveAndBandwidthScaling) {
  const auto s = spec();
  const auto full = sweep_injection(s, std::numbers::pi / 6, 5e-4, 36);
  const auto half = sweep_injection(s, std::numbers::pi / 6, 2.5e-4, 36);
  ASSERT_EQ(full.converged_count(), 37u);
  ASSERT_EQ(half.converged_count(), 37u);
  EXPECT_LT(closure_mismatch(full, s.coupling.omega_ref()), 1e-9);
  const double ratio = locking_bandwidth(half) / locking_bandwidth(full);
  EXPECT_GT(ratio, 0.4);
  EXPECT_LT(ratio, 0.6);
}
