#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kin/hamiltonian_flow.hpp"

namespace {

using kin::FlowParams;
using kin::HamiltonianFunction;
using kin::Monomial;
using kin::ProductPoint;

Monomial mono(double c, std::array<std::uint8_t, 6> e) { return {c, e}; }

const HamiltonianFunction kZ1({mono(1.0, {0, 0, 1, 0, 0, 0})});
const HamiltonianFunction kZ1Z2({mono(1.0, {0, 0, 1, 0, 0, 1})});

HamiltonianFunction random_hamiltonian(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-0.3, 0.3);
  std::uniform_int_distribution<int> var(0, 5), deg(1, 3);
  std::vector<Monomial> terms;
  for (int t = 0; t < 5; ++t) {
    Monomial m{coef(rng), {}};
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) ++m.exponents[var(rng)];
    terms.push_back(m);
  }
  return HamiltonianFunction(terms);
}

ProductPoint random_point(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return {kin::SpherePoint({n(rng), n(rng), n(rng)}), kin::SpherePoint({n(rng), n(rng), n(rng)})};
}

kin::TangentVector random_tangent(std::mt19937_64& rng, const ProductPoint& x) {
  std::normal_distribution<double> n;
  return kin::project_tangent(x, {{n(rng), n(rng), n(rng)}, {n(rng), n(rng), n(rng)}});
}

TEST(HamiltonianFunction, MergesTermsAndRejectsHighDegree) {
  const HamiltonianFunction h({mono(0.5, {1, 0, 0, 0, 0, 0}), mono(0.25, {1, 0, 0, 0, 0, 0}),
                               mono(1.0, {0, 1, 0, 0, 0, 0}), mono(-1.0, {0, 1, 0, 0, 0, 0})});
  ASSERT_EQ(h.terms().size(), 1u);
  EXPECT_DOUBLE_EQ(h.terms()[0].coefficient, 0.75);
  EXPECT_TRUE(HamiltonianFunction({mono(0.0, {3, 0, 0, 0, 0, 0})}).is_zero());
  EXPECT_THROW(HamiltonianFunction({mono(1.0, {2, 0, 0, 0, 2, 0})}), kin::DegreeTooHigh);
  EXPECT_EQ(mono(1.0, {1, 0, 1, 0, 0, 1}).degree(), 3);
}

TEST(HamiltonianFunction, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    const HamiltonianFunction h = random_hamiltonian(rng);
    kin::Ambient6 x;
    for (double& c : x) c = n(rng);
    const kin::Ambient6 g = h.gradient(x);
    for (int i = 0; i < 6; ++i) {
      const double eps = 1e-5;
      kin::Ambient6 xp = x, xm = x;
      xp[i] += eps;
      xm[i] -= eps;
      EXPECT_NEAR(g[i], (h.value(xp) - h.value(xm)) / (2 * eps), 1e-6);
    }
  }
}

TEST(VectorField, ConstantHamiltonianGivesZeroField) {
  const HamiltonianFunction c({mono(2.5, {})});
  std::mt19937_64 rng(2);
  const auto x = random_point(rng);
  EXPECT_EQ(kin::norm(kin::hamiltonian_vector_field(c, x)), 0.0);
}

TEST(VectorField, DefiningIdentityHolds) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const HamiltonianFunction h = random_hamiltonian(rng);
    const ProductPoint x = random_point(rng);
    const kin::TangentVector v = random_tangent(rng, x);
    const kin::TangentVector xh = kin::hamiltonian_vector_field(h, x);
    EXPECT_LT(kin::tangency_defect(x, xh), 1e-12);
    // dH(v) as the ambient directional derivative.
    const kin::Ambient6 g = h.gradient(kin::ambient(x));
    const double dh = g[0] * v.first.x + g[1] * v.first.y + g[2] * v.first.z + g[3] * v.second.x +
                      g[4] * v.second.y + g[5] * v.second.z;
    EXPECT_NEAR(kin::symplectic_form(x, xh, v), dh, 1e-10);
  }
}

TEST(VectorField, HeightFunctionRotatesFirstFactor) {
  std::mt19937_64 rng(4);
  const ProductPoint x = random_point(rng);
  const kin::TangentVector xh = kin::hamiltonian_vector_field(kZ1, x);
  const kin::Vec3 expect = kin::cross({0, 0, 1}, x.first.vec());
  EXPECT_NEAR(kin::norm(xh.first - expect), 0.0, 1e-15);
  EXPECT_EQ(kin::norm(xh.second), 0.0);
}

TEST(Flow, ZeroHamiltonianIsIdentity) {
  std::mt19937_64 rng(5);
  const ProductPoint x = random_point(rng);
  EXPECT_EQ(kin::flow_point(HamiltonianFunction{}, x, {1.0, 32}), x);
}

TEST(Flow, HeightFunctionMatchesClosedFormRotation) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const ProductPoint x = random_point(rng);
    const double t = kin::kPi / 2;
    const ProductPoint y = kin::flow_point(kZ1, x, FlowParams::with_max_step(t, 0.01));
    const kin::Vec3 p = x.first.vec();
    const kin::Vec3 rotated{std::cos(t) * p.x - std::sin(t) * p.y, std::sin(t) * p.x + std::cos(t) * p.y, p.z};
    EXPECT_NEAR(kin::norm(y.first.vec() - rotated), 0.0, 1e-9);
    EXPECT_NEAR(kin::norm(y.second.vec() - x.second.vec()), 0.0, 1e-14);
    EXPECT_NEAR(kin::norm(y.first.vec()), 1.0, 1e-12);
  }
  const ProductPoint e{kin::SpherePoint({1, 0, 0}), kin::SpherePoint({0, 0, 1})};
  const ProductPoint q = kin::flow_point(kZ1, e, FlowParams::with_max_step(kin::kPi / 2, 0.01));
  EXPECT_NEAR(q.first[1], 1.0, 1e-9);
}

TEST(Flow, EnergyDriftIsFourthOrderSmall) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const ProductPoint x = random_point(rng);
    const ProductPoint y = kin::flow_point(kZ1Z2, x, {1.0, 64});
    EXPECT_LT(std::abs(kZ1Z2.value(y) - kZ1Z2.value(x)), 1e-8);
  }
  // Halving the step shrinks the drift; the refined runs approach the exact
  // endpoint as h^4 until roundoff.
  const ProductPoint x = random_point(rng);
  const ProductPoint ref = kin::flow_point(kZ1Z2, x, {1.0, 1024});
  const double e32 = kin::ambient_distance(kin::flow_point(kZ1Z2, x, {1.0, 32}), ref);
  const double e64 = kin::ambient_distance(kin::flow_point(kZ1Z2, x, {1.0, 64}), ref);
  EXPECT_GT(e32 / e64, 10.0);
}

TEST(Flow, ParameterValidation) {
  EXPECT_THROW((FlowParams{0.1, 8}.validate()), kin::InvalidArgument);
  EXPECT_THROW((FlowParams{1.0, 16}.validate()), kin::InvalidArgument);
  EXPECT_NO_THROW((FlowParams{0.8, 16}.validate()));
  const FlowParams p = FlowParams::with_max_step(0.5, 0.01);
  EXPECT_EQ(p.steps, 50);
  EXPECT_LE(std::abs(p.dt()), 0.01);
  EXPECT_EQ(FlowParams::with_max_step(0.01, 0.01).steps, 16);

  const HamiltonianFunction fast({mono(20.0, {0, 0, 1, 0, 0, 0})});
  const ProductPoint e{kin::SpherePoint({1, 0, 0}), kin::SpherePoint({1, 0, 0})};
  EXPECT_THROW(kin::flow_point(fast, e, {0.8, 16}), kin::StepSizeTooLarge);
}

TEST(Flow, TimeMapIsSymplectic) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const HamiltonianFunction h = random_hamiltonian(rng);
    const ProductPoint x = random_point(rng);
    const auto u = random_tangent(rng, x);
    const auto v = random_tangent(rng, x);
    EXPECT_LT(kin::symplectic_pullback_error(h, FlowParams::with_max_step(0.5, 0.01), x, u, v), 1e-7);
  }
}

TEST(DeformSurface, ZeroAndRotationPreserveVolume) {
  const auto torus = kin::ProductTorusSurface::great_torus();
  const double v0 = kin::volume(torus);
  const auto still = kin::deform_surface(HamiltonianFunction{}, torus, {0.5, 16}, 64);
  EXPECT_NEAR(kin::volume(still, 128), v0, 1e-10 * v0);
  for (std::size_t k = 0; k < still.nodes().size(); k += 97) {
    const std::size_t i = k / 64, j = k % 64;
    EXPECT_EQ(still.node(i, j), torus.evaluate(i * still.spacing(), j * still.spacing()));
  }

  const auto lat = kin::ProductTorusSurface::latitude(0.3, 0.2, kin::normalized({1, 0, 1}));
  const double vl = kin::volume(lat);
  const auto rotated = kin::deform_surface(kZ1, lat, FlowParams::with_max_step(1.0, 0.02), 64);
  EXPECT_NEAR(kin::volume(rotated, 128), vl, 1e-6 * vl);
}

TEST(DeformSurface, CoupledFlowStaysLagrangianAndDoesNotShrink) {
  const HamiltonianFunction h({mono(0.3, {0, 0, 1, 0, 0, 1})});
  const auto mesh =
      kin::deform_surface(h, kin::ProductTorusSurface::great_torus(), FlowParams::with_max_step(0.5, 0.01), 128);
  EXPECT_LT(kin::lagrangian_defect(mesh), 1e-6);
  EXPECT_GE(kin::volume(mesh, 128), 4.0 * kin::kPi * kin::kPi - 1e-3);
  EXPECT_THROW(kin::deform_surface(h, kin::ProductTorusSurface::great_torus(), {0.5, 16}, 32), kin::InvalidArgument);
}

}  // namespace
