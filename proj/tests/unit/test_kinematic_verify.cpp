#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "kin/kinematic_verify.hpp"

namespace {

using kin::GraphSurface;
using kin::HamiltonianFunction;
using kin::MeasureConstants;
using kin::MonteCarloOptions;
using kin::ProductTorusSurface;

const double kPi4 = std::pow(kin::kPi, 4);

// Closed-form value of 16 vol(N) vol(L) / vol(G) for product tori of
// latitude offsets (c1, c2) against the great torus.
double product_mean(double c1, double c2) {
  const double vn = 4.0 * kin::kPi * kin::kPi * std::sqrt(1 - c1 * c1) * std::sqrt(1 - c2 * c2);
  return 16.0 * vn * 4.0 * kin::kPi * kin::kPi / MeasureConstants::vol_g;
}

TEST(MonteCarlo, GreatToriAlwaysMeetInFourPoints) {
  const auto great = ProductTorusSurface::great_torus();
  const auto est = kin::mc_expected_count(great, great, 2000, 1);
  EXPECT_EQ(est.mean, 4.0);
  EXPECT_EQ(est.stderr_mean, 0.0);
  EXPECT_EQ(est.sample_count, 2000u);
  EXPECT_LT(est.discard_count, 2u);
  EXPECT_NEAR(est.integral, 256.0 * kPi4, 1e-9 * 256.0 * kPi4);
  EXPECT_EQ(est.integral_stderr, 0.0);
}

TEST(MonteCarlo, LatitudeTorusMeanMatchesProductFormula) {
  const double expect = product_mean(0.5, 0.5);
  EXPECT_NEAR(expect, 3.0, 1e-12);
  const auto est = kin::mc_expected_count(ProductTorusSurface::latitude(0.5, 0.5), ProductTorusSurface::great_torus(),
                                          20000, 2);
  EXPECT_GT(est.stderr_mean, 0.0);
  EXPECT_LE(std::abs(est.mean - expect), 3.0 * est.stderr_mean);
  EXPECT_NEAR(est.integral, est.mean * MeasureConstants::vol_g, 1e-9 * est.integral);
}

TEST(MonteCarlo, AntiDiagonalThroughContourCounter) {
  const auto est = kin::mc_expected_count(GraphSurface::anti_diagonal(), ProductTorusSurface::great_torus(), 1000, 3);
  // 4 pi vol(N) vol(L) / vol(G) with vol(N) = 8 pi.
  const double expect = 4.0 * kin::kPi * 8.0 * kin::kPi * 4.0 * kin::kPi * kin::kPi / MeasureConstants::vol_g;
  EXPECT_NEAR(expect, 2.0, 1e-12);
  EXPECT_LE(std::abs(est.mean - expect), 3.0 * est.stderr_mean + 1e-12);
  EXPECT_LE(est.discard_count, 10u);
}

TEST(MonteCarlo, DeterministicAndIndependentOfWorkers) {
  const auto n = ProductTorusSurface::latitude(0.2, 0.7, kin::normalized({1, 1, 0}));
  const auto l = ProductTorusSurface::latitude(0.4, 0.1);
  MonteCarloOptions one, three;
  three.workers = 3;
  const auto a = kin::mc_expected_count(n, l, 3000, 42, one);
  const auto b = kin::mc_expected_count(n, l, 3000, 42, three);
  const auto c = kin::mc_expected_count(n, l, 3000, 43, one);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr_mean, b.stderr_mean);
  EXPECT_EQ(a.discard_count, b.discard_count);
  EXPECT_NE(a.mean, c.mean);

  const auto anti = GraphSurface::anti_diagonal();
  const auto d = kin::mc_expected_count(anti, l, 1000, 5, one);
  const auto e = kin::mc_expected_count(anti, l, 1000, 5, three);
  EXPECT_EQ(d.mean, e.mean);
  EXPECT_EQ(d.discard_count, e.discard_count);
}

TEST(MonteCarlo, DiscardBudgetIsEnforced) {
  // Without any discard budget a run that hits a non-generic draw fails.
  MonteCarloOptions strict;
  strict.max_discard_fraction = 0.0;
  const auto anti = GraphSurface::anti_diagonal();
  const auto great = ProductTorusSurface::great_torus();
  const auto relaxed = kin::mc_expected_count(anti, great, 1000, 7);
  ASSERT_GT(relaxed.discard_count, 0u);
  EXPECT_THROW(kin::mc_expected_count(anti, great, 1000, 7, strict), kin::ExcessiveDiscards);
  EXPECT_THROW(kin::mc_expected_count(anti, great, 0, 7), kin::InvalidArgument);
}

TEST(RhsLagrangian, ReferenceSurfaces) {
  const auto great = ProductTorusSurface::great_torus();
  EXPECT_NEAR(kin::rhs_lagrangian(great, great), 256.0 * kPi4, 1e-6 * 256.0 * kPi4);
  EXPECT_NEAR(kin::rhs_lagrangian(GraphSurface::anti_diagonal(), great), 128.0 * kPi4, 1e-6 * 128.0 * kPi4);
  // Product N: perimeter 4 everywhere, so 16 vol(N) vol(L).
  const auto lat = ProductTorusSurface::latitude(0.5, 0.5);
  EXPECT_NEAR(kin::rhs_lagrangian(lat, great), 3.0 * MeasureConstants::vol_g, 1e-6 * 3.0 * MeasureConstants::vol_g);
  EXPECT_NEAR(kin::rhs_lagrangian_converged(great, great, 64), 256.0 * kPi4, 1e-6 * 256.0 * kPi4);
  EXPECT_THROW(kin::rhs_lagrangian(GraphSurface::diagonal(), great), kin::NotLagrangian);
}

TEST(RhsGeneral, AgreesWithLagrangianForm) {
  const auto great = ProductTorusSurface::great_torus();
  EXPECT_NEAR(kin::rhs_general(great, great, 16, 16), 256.0 * kPi4, 1e-4 * 256.0 * kPi4);
  EXPECT_NEAR(kin::rhs_general(GraphSurface::anti_diagonal(), great, 24, 8), 128.0 * kPi4, 1e-4 * 128.0 * kPi4);
  const auto lat = ProductTorusSurface::latitude(0.3, -0.4, kin::normalized({1, 0, 1}));
  const double lagr = kin::rhs_lagrangian(lat, great, 64);
  EXPECT_NEAR(kin::rhs_general(lat, great, 16, 16), lagr, 1e-4 * lagr);
}

TEST(Verification, PoincareIdentityForProductAndGraph) {
  const auto great = ProductTorusSurface::great_torus();
  const auto r = kin::verify_poincare(great, great, 1000, 9, 1e-6);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.rhs.size(), 1u);
  EXPECT_NEAR(r.lhs, 256.0 * kPi4, 1e-9 * r.lhs);
  EXPECT_NEAR(r.rhs[0], 256.0 * kPi4, 1e-6 * r.rhs[0]);
  EXPECT_EQ(r.seed, 9u);
  EXPECT_FALSE(r.name.empty());

  const auto a = kin::verify_poincare(GraphSurface::anti_diagonal(), great, 1000, 10, 1e-6);
  EXPECT_TRUE(a.pass);
  EXPECT_NEAR(a.rhs[0], 128.0 * kPi4, 1e-6 * a.rhs[0]);
  EXPECT_NEAR(a.tolerance, 3.0 * a.std_error + 1e-6 * a.rhs[0], 1e-9 * a.rhs[0]);
}

TEST(Verification, BoundsAndEqualityCases) {
  const auto great = ProductTorusSurface::great_torus();
  const auto up = kin::verify_bounds(great, great, 1000, 11);
  ASSERT_EQ(up.rhs.size(), 2u);
  EXPECT_TRUE(up.pass);
  EXPECT_NEAR(up.rhs[1], 256.0 * kPi4, 1e-6 * up.rhs[1]);
  EXPECT_NEAR(up.rhs[0], 64.0 * kin::kPi * kPi4, 1e-6 * up.rhs[0]);
  ASSERT_TRUE(up.derived.count("upper_gap"));
  EXPECT_LT(up.derived.at("upper_gap"), 1e-6);

  const auto low = kin::verify_bounds(GraphSurface::anti_diagonal(), great, 1000, 12);
  EXPECT_TRUE(low.pass);
  ASSERT_TRUE(low.derived.count("lower_gap"));
  EXPECT_LT(low.derived.at("lower_gap"), 1e-6);
  EXPECT_LE(std::abs(low.lhs - low.rhs[0]), 3.0 * low.std_error + 1e-9 * low.rhs[0]);
}

TEST(Verification, ChainEqualitiesForIsometricFlows) {
  kin::ChainOptions opt;
  opt.mesh = 64;
  const std::vector<HamiltonianFunction> hs{HamiltonianFunction{},
                                            HamiltonianFunction(std::vector<kin::Monomial>{{1.0, {0, 0, 1, 0, 0, 0}}})};
  for (const auto& h : hs) {
    const auto chain = kin::verify_main_chain(h, 0.5, 1000, 13, opt);
    const double c = 256.0 * kPi4;
    EXPECT_NEAR(chain.c, c, 1e-9 * c);
    EXPECT_NEAR(chain.a, c, 1e-6 * c);
    EXPECT_LE(std::abs(chain.b - c), 3.0 * chain.b_stderr + 1e-9 * c);
    EXPECT_TRUE(chain.upper_holds());
    EXPECT_TRUE(chain.lower_holds());
    EXPECT_NEAR(chain.deformed_volume, 4.0 * kin::kPi * kin::kPi, 1e-6);
    EXPECT_LT(chain.lagrangian_defect, 1e-6);
    EXPECT_LT(chain.pullback_error, 1e-6);
    const auto reports = chain.reports(13);
    ASSERT_EQ(reports.size(), 4u);
    for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name;
  }
}

TEST(Verification, ChainReportsCarryAllThreeNumbers) {
  kin::ChainResult fake;
  fake.a = 1.0;
  fake.b = 3.0;
  fake.c = 2.0;
  fake.deformed_volume = 40.0;
  const auto reports = fake.reports(1);
  ASSERT_FALSE(reports.empty());
  const auto& chain = reports.front();
  EXPECT_EQ(chain.name, "chain");
  EXPECT_FALSE(chain.pass);
  EXPECT_EQ(chain.lhs, 3.0);
  ASSERT_EQ(chain.rhs.size(), 2u);
  EXPECT_EQ(chain.rhs[0], 2.0);
  EXPECT_EQ(chain.rhs[1], 1.0);
}

}  // namespace
