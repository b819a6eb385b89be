#pragma once

// Surface models in S^2 x S^2.
//
// A surface is described by one or more charts over rectangular parameter
// domains. Multi-chart surfaces carry a smooth partition of unity so that
// integrals are sums of weighted per-chart quadratures.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include "kin/geometry_core.hpp"
#include "kin/rotation_sampler.hpp"

namespace kin {

struct ChartDomain {
  double u0 = 0.0;
  double u1 = kTwoPi;
  double v0 = 0.0;
  double v1 = kTwoPi;
  bool periodic_u = true;
  bool periodic_v = true;
};

/// Point together with the two coordinate partials.
struct SurfaceJet {
  ProductPoint point;
  TangentVector du;
  TangentVector dv;
};

double area_element(const SurfaceJet& jet);

class Surface {
 public:
  virtual ~Surface() = default;

  virtual std::size_t chart_count() const { return 1; }
  virtual ChartDomain domain(std::size_t chart) const = 0;
  virtual SurfaceJet jet(std::size_t chart, double u, double v) const = 0;
  /// Partition-of-unity weight of the chart at (u, v).
  virtual double weight(std::size_t /*chart*/, double /*u*/, double /*v*/) const { return 1.0; }

  virtual ProductPoint evaluate(std::size_t chart, double u, double v) const {
    return jet(chart, u, v).point;
  }

  ProductPoint evaluate(double u, double v) const { return evaluate(0, u, v); }

  /// Orthonormalized tangent plane; DegenerateParameterization if the
  /// partials are within 1e-6 rad of parallel.
  TangentPlane tangent_plane(std::size_t chart, double u, double v) const;
  TangentPlane tangent_plane(double u, double v) const { return tangent_plane(0, u, v); }

 protected:
  /// Wraps periodic coordinates into the domain and rejects anything outside
  /// a non-periodic range or non-finite (OutOfDomain).
  static void check_domain(const ChartDomain& d, double& u, double& v);
};

/// Circle {p : <p, axis> = offset} on S^2 with a fixed parameterization
/// p(s) = offset*axis + r (cos s e1 + sin s e2).
class Circle {
 public:
  /// Throws InvalidArgument for |offset| >= 1 or radius below 1e-6.
  Circle(const Vec3& axis, double offset);

  const Vec3& axis() const noexcept { return axis_; }
  double offset() const noexcept { return offset_; }
  double radius() const noexcept { return radius_; }

  Vec3 point(double s) const;
  Vec3 derivative(double s) const;
  Vec3 second_derivative(double s) const;

  /// The image circle under `r`, with the parameterization carried along.
  Circle rotated(const Rotation& r) const;

 private:
  Circle(const Vec3& axis, double offset, const Vec3& e1, const Vec3& e2);

  Vec3 axis_;
  double offset_;
  double radius_;
  Vec3 e1_;
  Vec3 e2_;
};

/// Product of two circles, parameterized over [0, 2pi)^2.
class ProductTorusSurface : public Surface {
 public:
  ProductTorusSurface(Circle c1, Circle c2) : c1_(std::move(c1)), c2_(std::move(c2)) {}

  /// Product of the equators about the z-axis.
  static ProductTorusSurface great_torus();
  static ProductTorusSurface latitude(double c1, double c2, const Vec3& axis1 = {0, 0, 1},
                                      const Vec3& axis2 = {0, 0, 1});

  const Circle& circle1() const noexcept { return c1_; }
  const Circle& circle2() const noexcept { return c2_; }

  ProductTorusSurface transformed(const GroupElement& g) const;

  ChartDomain domain(std::size_t) const override { return {}; }
  SurfaceJet jet(std::size_t chart, double u, double v) const override;

 private:
  Circle c1_;
  Circle c2_;
};

/// Graph {(z, M z)} of an isometry M = +-R of S^2. Two polar charts (about the
/// z- and x-axes) with caps of radius 0.2 removed, glued by a smooth
/// partition of unity.
class GraphSurface : public Surface {
 public:
  GraphSurface(const Rotation& r, bool antipodal) : rotation_(r), antipodal_(antipodal) {}

  /// z -> (z, -z).
  static GraphSurface anti_diagonal() { return {Rotation::identity(), true}; }
  /// z -> (z, z).
  static GraphSurface diagonal() { return {Rotation::identity(), false}; }

  Vec3 map(const Vec3& z) const;
  ProductPoint at(const SpherePoint& z) const;

  static constexpr double kCapRadius = 0.2;

  std::size_t chart_count() const override { return 2; }
  ChartDomain domain(std::size_t chart) const override;
  SurfaceJet jet(std::size_t chart, double u, double v) const override;
  double weight(std::size_t chart, double u, double v) const override;

 private:
  Rotation rotation_;
  bool antipodal_;
};

/// Periodic m x m lattice of points, node (i, j) at parameters (i h, j h)
/// with h = 2 pi / m. Between nodes the surface is the tensor-product
/// 9-point Lagrange interpolant of the ambient coordinates, renormalized onto
/// each sphere; at nodes its partials are the 8th-order central differences.
class MeshSurface : public Surface {
 public:
  /// Nodes row-major (index i * m + j). Requires m >= 16 and unit factors
  /// within 1e-10 (MeshFormatError otherwise).
  MeshSurface(std::size_t m, std::vector<ProductPoint> nodes);

  /// Samples chart 0 of a surface whose domain is doubly periodic.
  static MeshSurface sample(const Surface& s, std::size_t m);

  std::size_t resolution() const noexcept { return m_; }
  double spacing() const noexcept { return kTwoPi / static_cast<double>(m_); }
  const ProductPoint& node(std::size_t i, std::size_t j) const { return nodes_[i * m_ + j]; }
  const std::vector<ProductPoint>& nodes() const noexcept { return nodes_; }

  /// Plain-text format: `mesh m` then m*m lines of six coordinates.
  void write(std::ostream& os) const;
  static MeshSurface read(std::istream& is);

  ChartDomain domain(std::size_t) const override { return {}; }
  SurfaceJet jet(std::size_t chart, double u, double v) const override;
  using Surface::evaluate;
  ProductPoint evaluate(std::size_t chart, double u, double v) const override;

 private:
  std::size_t m_;
  std::vector<ProductPoint> nodes_;
  std::vector<double> raw_;  // 6 coordinates per node
};

/// The surface g . S for a fixed group element.
class TransformedSurface : public Surface {
 public:
  TransformedSurface(std::shared_ptr<const Surface> base, const GroupElement& g)
      : base_(std::move(base)), g_(g) {}

  std::size_t chart_count() const override { return base_->chart_count(); }
  ChartDomain domain(std::size_t chart) const override { return base_->domain(chart); }
  SurfaceJet jet(std::size_t chart, double u, double v) const override;
  double weight(std::size_t chart, double u, double v) const override {
    return base_->weight(chart, u, v);
  }

 private:
  std::shared_ptr<const Surface> base_;
  GroupElement g_;
};

/// Parameter values of an m-point rule along one axis: nodes u0 + i h for a
/// periodic axis, midpoints u0 + (i + 1/2) h otherwise.
std::vector<double> quadrature_nodes(double lo, double hi, bool periodic, std::size_t m);

/// Area by composite quadrature of sqrt(EG - F^2) with m points per axis
/// and chart.
double volume(const Surface& s, std::size_t m = 256);

/// Max |omega(t1, t2)| over an orthonormal tangent basis at about k
/// parameter samples; zero exactly for Lagrangian surfaces.
double lagrangian_defect(const Surface& s, std::size_t k = 1024);

}  // namespace kin
