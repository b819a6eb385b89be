#pragma once

// Linear and symplectic algebra of the tangent space of S^2 x S^2.
//
// Points and tangent vectors are carried in ambient coordinates: a point is a
// pair of unit vectors in R^3, a tangent vector a pair of 3-vectors orthogonal
// to the respective factors. Every invariant quantity (angles, symplectic
// values) is evaluated directly in these coordinates, which agrees with the
// model tangent space at the origin by invariance under SO(3) x SO(3).

#include <array>
#include <span>
#include <vector>

#include "kin/errors.hpp"
#include "kin/vec.hpp"

namespace kin {

/// A point of the unit sphere S^2 in R^3.
class SpherePoint {
 public:
  /// Normalizes `v`; throws InvalidArgument for a (near) zero vector.
  explicit SpherePoint(const Vec3& v);

  const Vec3& vec() const noexcept { return v_; }
  double operator[](int i) const noexcept { return v_[i]; }

  friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

 private:
  Vec3 v_;
};

struct ProductPoint {
  SpherePoint first;
  SpherePoint second;

  friend bool operator==(const ProductPoint&, const ProductPoint&) = default;
};

/// Euclidean distance of two product points in R^6.
double ambient_distance(const ProductPoint& a, const ProductPoint& b);

struct TangentVector {
  Vec3 first;
  Vec3 second;

  TangentVector& operator+=(const TangentVector& o) {
    first += o.first;
    second += o.second;
    return *this;
  }
  TangentVector& operator-=(const TangentVector& o) {
    first -= o.first;
    second -= o.second;
    return *this;
  }
  TangentVector& operator*=(double s) {
    first *= s;
    second *= s;
    return *this;
  }
  friend TangentVector operator+(TangentVector a, const TangentVector& b) { return a += b; }
  friend TangentVector operator-(TangentVector a, const TangentVector& b) { return a -= b; }
  friend TangentVector operator*(TangentVector a, double s) { return a *= s; }
  friend TangentVector operator*(double s, TangentVector a) { return a *= s; }
};

double inner(const TangentVector& a, const TangentVector& b);
double norm(const TangentVector& a);

/// Largest deviation of `v` from the tangent space at `x`.
double tangency_defect(const ProductPoint& x, const TangentVector& v);

/// Orthogonal projection onto the tangent space at `x`.
TangentVector project_tangent(const ProductPoint& x, const TangentVector& v);

/// Orthonormal frame {e1, e2, e3, e4} of T_x with e1, e2 on the first factor,
/// e3, e4 on the second and J e1 = e2, J e3 = e4.
std::array<TangentVector, 4> tangent_frame(const ProductPoint& x);

/// The two complex structures of the tangent space. J rotates both factors
/// positively; J' reverses the second factor.
enum class ComplexStructure { J, JPrime };

TangentVector apply_structure(ComplexStructure s, const ProductPoint& x, const TangentVector& v);

/// Oriented 2-plane in T_x(S^2 x S^2) given by an orthonormal basis.
class TangentPlane {
 public:
  /// Validates orthonormality (NonOrthonormalInput) and tangency (NotTangent)
  /// within 1e-8.
  TangentPlane(const ProductPoint& base, const TangentVector& u1, const TangentVector& u2);

  /// Orthonormalizes two spanning vectors by modified Gram-Schmidt, with a
  /// second pass when the pair is badly conditioned. Throws
  /// DegenerateParameterization when the vectors are within 1e-6 rad of
  /// parallel.
  static TangentPlane from_spanning(const ProductPoint& base, const TangentVector& a,
                                    const TangentVector& b);

  const ProductPoint& base() const noexcept { return base_; }
  const TangentVector& u1() const noexcept { return basis_[0]; }
  const TangentVector& u2() const noexcept { return basis_[1]; }
  const std::array<TangentVector, 2>& basis() const noexcept { return basis_; }

 private:
  struct Unchecked {};
  TangentPlane(Unchecked, const ProductPoint& base, const TangentVector& u1,
               const TangentVector& u2)
      : base_(base), basis_{u1, u2} {}

  ProductPoint base_;
  std::array<TangentVector, 2> basis_;
};

/// sigma(V, W) = |v_1 ^ ... ^ v_p ^ w_1 ^ ... ^ w_q| for orthonormal systems in
/// a common Euclidean space, computed as the square root of the Gram
/// determinant of the concatenated system.
double subspace_angle(std::span<const std::vector<double>> v, std::span<const std::vector<double>> w);

/// Angle between two planes attached at the same point.
double subspace_angle(const TangentPlane& v, const TangentPlane& w);

/// Signed <S u1, u2>; its absolute value is the cosine of the Kahler angle.
double kahler_cosine(const TangentPlane& p, ComplexStructure s);

/// Kahler angle in [0, pi/2]; 0 for complex lines, pi/2 for Lagrangian planes.
/// Unsigned, so independent of the orientation of the basis.
double kahler_angle(const TangentPlane& p, ComplexStructure s);

/// omega_0 + omega_0 evaluated on tangent vectors at x. Throws NotTangent when
/// either argument leaves the tangent space by more than 1e-8.
double symplectic_form(const ProductPoint& x, const TangentVector& u, const TangentVector& v);

/// Orthogonal complement of `p` inside T_x, with an orthonormal basis.
TangentPlane normal_plane(const TangentPlane& p);

// ---------------------------------------------------------------------------
// Model tangent space R^4 = T_o with basis e1..e4 and its exterior square.

using Vec4 = std::array<double, 4>;

/// Coordinates of an element of Lambda^2(R^4) in the basis
/// e12, e13, e14, e23, e24, e34.
struct Bivector {
  std::array<double, 6> c{};

  friend double inner(const Bivector& a, const Bivector& b) {
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += a.c[i] * b.c[i];
    return s;
  }
};

Bivector wedge(const Vec4& a, const Vec4& b);

/// The origin o = ((0,0,1), (0,0,1)) used as the model point.
ProductPoint model_origin();

/// Embeds model coordinates (w.r.t. tangent_frame(model_origin())) as a
/// tangent vector at the origin.
TangentVector model_vector(const Vec4& coords);

}  // namespace kin
