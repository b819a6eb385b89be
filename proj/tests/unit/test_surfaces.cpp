#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "kin/surfaces.hpp"

namespace {

using kin::ComplexStructure;
using kin::GraphSurface;
using kin::kPi;
using kin::kTwoPi;
using kin::ProductTorusSurface;

// A product torus with the non-uniform parameterization u -> u + 0.3 sin u on
// the first factor. Same image and area as the plain torus, but the mesh
// interpolant is no longer exact on it.
class WarpedTorus : public kin::Surface {
 public:
  explicit WarpedTorus(ProductTorusSurface base) : base_(std::move(base)) {}
  kin::ChartDomain domain(std::size_t) const override { return {}; }
  kin::SurfaceJet jet(std::size_t, double u, double v) const override {
    const double s = u + 0.3 * std::sin(u);
    kin::SurfaceJet j = base_.jet(0, s, v);
    j.du *= 1.0 + 0.3 * std::cos(u);
    return j;
  }

 private:
  ProductTorusSurface base_;
};

// Area of the unit sphere by a midpoint rule in polar coordinates.
double sphere_area_oracle(int n) {
  double total = 0.0;
  const double h = kPi / n;
  for (int i = 0; i < n; ++i) total += std::sin((i + 0.5) * h) * h;
  return total * kTwoPi;
}

TEST(Evaluate, ReferencePoints) {
  const auto torus = ProductTorusSurface::great_torus();
  const auto p = torus.evaluate(0.0, 0.0);
  EXPECT_NEAR(kin::norm(p.first.vec() - kin::Vec3{1, 0, 0}), 0.0, 1e-15);
  EXPECT_NEAR(kin::norm(p.second.vec() - kin::Vec3{1, 0, 0}), 0.0, 1e-15);

  const auto anti = GraphSurface::anti_diagonal();
  const auto q = anti.at(kin::SpherePoint({0, 0, 1}));
  EXPECT_EQ(q.first.vec(), (kin::Vec3{0, 0, 1}));
  EXPECT_EQ(q.second.vec(), (kin::Vec3{0, 0, -1}));

  const kin::Circle c({0, 0, 1}, 0.5);
  const kin::Vec3 s0 = c.point(0.0);
  EXPECT_NEAR(s0.x, std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(s0.y, 0.0, 1e-15);
  EXPECT_NEAR(s0.z, 0.5, 1e-15);
  EXPECT_NEAR(c.radius(), std::sqrt(0.75), 1e-15);
}

TEST(Evaluate, ImagesSatisfyDefiningConstraints) {
  const auto lat = ProductTorusSurface::latitude(0.3, -0.6, kin::normalized({1, 1, 0}), {0, 1, 0});
  for (int i = 0; i < 50; ++i) {
    const double u = 0.37 * i, v = 1.1 * i;
    const auto p = lat.evaluate(u, v);
    EXPECT_NEAR(kin::dot(p.first.vec(), lat.circle1().axis()), 0.3, 1e-12);
    EXPECT_NEAR(kin::dot(p.second.vec(), lat.circle2().axis()), -0.6, 1e-12);
  }
  auto rng = kin::sample_stream(3, 0);
  const GraphSurface graph(kin::sample_haar_rotation(rng), true);
  for (std::size_t chart = 0; chart < 2; ++chart) {
    for (int i = 0; i < 20; ++i) {
      const auto p = graph.evaluate(chart, 0.3 + 0.1 * i, 0.4 * i);
      EXPECT_NEAR(kin::norm(p.second.vec() - graph.map(p.first.vec())), 0.0, 1e-12);
    }
  }
}

TEST(Evaluate, RejectsOutOfDomainParameters) {
  const auto anti = GraphSurface::anti_diagonal();
  EXPECT_THROW(anti.evaluate(0, 0.0, 1.0), kin::OutOfDomain);
  EXPECT_THROW(anti.evaluate(0, kPi, 1.0), kin::OutOfDomain);
  EXPECT_THROW(anti.evaluate(2, 1.0, 1.0), kin::OutOfDomain);
  const auto torus = ProductTorusSurface::great_torus();
  EXPECT_THROW(torus.evaluate(std::nan(""), 0.0), kin::OutOfDomain);
  // Periodic axes wrap.
  EXPECT_LT(kin::ambient_distance(torus.evaluate(7.0, -1.0), torus.evaluate(7.0 - kTwoPi, kTwoPi - 1.0)), 1e-14);
}

TEST(Circles, DegenerateOffsetsAreRejected) {
  EXPECT_THROW(kin::Circle({0, 0, 1}, 1.0), kin::InvalidArgument);
  EXPECT_THROW(kin::Circle({0, 0, 1}, -1.0 + 1e-14), kin::InvalidArgument);
  EXPECT_NO_THROW(kin::Circle({0, 0, 1}, 0.999));
}

TEST(TangentPlanes, ProductToriAreLagrangianForBothStructures) {
  const auto torus = ProductTorusSurface::latitude(0.2, -0.7, kin::normalized({1, 2, 3}), {0, 1, 0});
  for (int i = 0; i < 40; ++i) {
    const auto t = torus.tangent_plane(0.21 * i, 0.53 * i);
    EXPECT_NEAR(kin::kahler_angle(t, ComplexStructure::J), kPi / 2, 1e-10);
    EXPECT_NEAR(kin::kahler_angle(t, ComplexStructure::JPrime), kPi / 2, 1e-10);
    EXPECT_NEAR(kin::symplectic_form(t.base(), t.u1(), t.u2()), 0.0, 1e-12);
  }
}

TEST(TangentPlanes, AntiDiagonalIsJLagrangianAndJPrimeComplex) {
  const auto anti = GraphSurface::anti_diagonal();
  for (std::size_t chart = 0; chart < 2; ++chart) {
    for (int i = 0; i < 50; ++i) {
      const double u = 0.25 + (kPi - 0.5) * i / 49.0;
      const double v = 0.127 * i;
      const auto t = anti.tangent_plane(chart, u, v);
      EXPECT_NEAR(kin::kahler_angle(t, ComplexStructure::J), kPi / 2, 1e-10);
      EXPECT_LT(kin::kahler_angle(t, ComplexStructure::JPrime), 1e-6);
    }
  }
}

TEST(Volume, ReferenceSurfaces) {
  const double four_pi_sq = 4.0 * kPi * kPi;
  EXPECT_NEAR(kin::volume(ProductTorusSurface::great_torus()), four_pi_sq, 1e-10 * four_pi_sq);

  const double lengths = kTwoPi * std::sqrt(1 - 0.36) * kTwoPi * std::sqrt(1 - 0.64);
  EXPECT_NEAR(kin::volume(ProductTorusSurface::latitude(0.6, 0.8)), lengths, 1e-10 * lengths);
  EXPECT_NEAR(lengths, four_pi_sq * 0.8 * 0.6, 1e-12);

  // The graph metric is twice the round one, so the area element doubles.
  const double oracle = 2.0 * sphere_area_oracle(20000);
  EXPECT_NEAR(oracle, 8.0 * kPi, 1e-7);
  EXPECT_NEAR(kin::volume(GraphSurface::anti_diagonal()), 8.0 * kPi, 1e-6 * 8.0 * kPi);
  EXPECT_NEAR(kin::volume(GraphSurface::diagonal()), 8.0 * kPi, 1e-6 * 8.0 * kPi);
}

TEST(Volume, InvariantUnderGroupAction) {
  auto base = std::make_shared<ProductTorusSurface>(ProductTorusSurface::latitude(0.4, 0.1));
  auto graph = std::make_shared<GraphSurface>(GraphSurface::anti_diagonal());
  for (std::uint64_t i = 0; i < 5; ++i) {
    auto rng = kin::sample_stream(19, i);
    const auto g = kin::sample_group_element(rng);
    const double vt = kin::volume(*base, 64);
    EXPECT_NEAR(kin::volume(kin::TransformedSurface(base, g), 64), vt, 1e-8 * vt);
    const double vg = kin::volume(*graph, 64);
    EXPECT_NEAR(kin::volume(kin::TransformedSurface(graph, g), 64), vg, 1e-8 * vg);
  }
}

TEST(Volume, MeshSamplingConvergesAtLeastQuadratically) {
  const WarpedTorus warped(ProductTorusSurface::latitude(0.3, 0.5, kin::normalized({0, 1, 1})));
  const double exact = 4.0 * kPi * kPi * std::sqrt(1 - 0.09) * std::sqrt(1 - 0.25);
  EXPECT_NEAR(kin::volume(warped, 256), exact, 1e-10 * exact);

  const double e16 = std::abs(kin::volume(kin::MeshSurface::sample(warped, 16), 128) - exact);
  const double e32 = std::abs(kin::volume(kin::MeshSurface::sample(warped, 32), 128) - exact);
  EXPECT_GT(e16, 0.0);
  EXPECT_TRUE(e32 <= e16 / 4.0 || e32 < 1e-11) << "e16=" << e16 << " e32=" << e32;
  EXPECT_LT(e32, 1e-4 * exact);
}

TEST(LagrangianDefect, ReferenceSurfaces) {
  EXPECT_LT(kin::lagrangian_defect(ProductTorusSurface::latitude(0.5, -0.2, {1, 0, 0})), 1e-10);
  EXPECT_LT(kin::lagrangian_defect(GraphSurface::anti_diagonal()), 1e-10);
  // The diagonal is symplectic: omega = 2 omega_0(t1, t2) on a unit-speed
  // frame with each t having half its length on each factor, so 1.
  EXPECT_NEAR(kin::lagrangian_defect(GraphSurface::diagonal()), 1.0, 1e-10);
}

TEST(MeshSurface, NodesMatchSourceAndInterpolationIsAccurate) {
  const auto lat = ProductTorusSurface::latitude(0.2, 0.4, kin::normalized({1, 0, 1}));
  const auto mesh = kin::MeshSurface::sample(lat, 64);
  EXPECT_EQ(mesh.resolution(), 64u);
  EXPECT_DOUBLE_EQ(mesh.spacing(), kTwoPi / 64);
  EXPECT_LT(kin::ambient_distance(mesh.node(3, 5), lat.evaluate(3 * mesh.spacing(), 5 * mesh.spacing())), 1e-15);
  for (int i = 0; i < 30; ++i) {
    const double u = 0.123 + 0.2 * i, v = 2.0 - 0.31 * i;
    EXPECT_LT(kin::ambient_distance(mesh.evaluate(u, v), lat.evaluate(u, v)), 1e-8);
    const auto p = mesh.evaluate(u, v);
    EXPECT_NEAR(kin::norm(p.first.vec()), 1.0, 1e-14);
    EXPECT_NEAR(kin::norm(p.second.vec()), 1.0, 1e-14);
  }
}

TEST(MeshSurface, TextRoundTrip) {
  const auto mesh = kin::MeshSurface::sample(ProductTorusSurface::latitude(0.1, 0.7), 16);
  std::stringstream ss;
  mesh.write(ss);
  EXPECT_EQ(ss.str().rfind("mesh 16\n", 0), 0u);
  const auto back = kin::MeshSurface::read(ss);
  ASSERT_EQ(back.resolution(), 16u);
  for (std::size_t k = 0; k < mesh.nodes().size(); ++k) EXPECT_LT(kin::ambient_distance(back.nodes()[k], mesh.nodes()[k]), 1e-15);
}

TEST(MeshSurface, RejectsMalformedInput) {
  std::istringstream bad_header("grid 16\n");
  EXPECT_THROW(kin::MeshSurface::read(bad_header), kin::MeshFormatError);
  std::istringstream truncated("mesh 16\n1 0 0 1 0 0\n");
  EXPECT_THROW(kin::MeshSurface::read(truncated), kin::MeshFormatError);
  std::vector<kin::ProductPoint> few(8 * 8, kin::ProductPoint{kin::SpherePoint({1, 0, 0}), kin::SpherePoint({1, 0, 0})});
  EXPECT_THROW(kin::MeshSurface(8, few), kin::MeshFormatError);
}

TEST(Quadrature, NodePlacement) {
  const auto periodic = kin::quadrature_nodes(0.0, 1.0, true, 4);
  ASSERT_EQ(periodic.size(), 4u);
  EXPECT_DOUBLE_EQ(periodic[1], 0.25);
  const auto closed = kin::quadrature_nodes(0.0, 1.0, false, 4);
  EXPECT_DOUBLE_EQ(closed[0], 0.125);
  EXPECT_DOUBLE_EQ(closed[3], 0.875);
}

}  // namespace
