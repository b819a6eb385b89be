#include "kin/geometry_core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace kin {

namespace {

constexpr double kOrthonormalTol = 1e-8;
constexpr double kTangentTol = 1e-8;
constexpr double kReorthogonalizeCondition = 1e6;
constexpr double kMinSpanningAngle = 1e-6;

void require_tangent(const ProductPoint& x, const TangentVector& v) {
  if (tangency_defect(x, v) > kTangentTol) {
    throw NotTangent("tangent vector leaves T_x by more than 1e-8");
  }
}

// Determinant of a small dense matrix by Gaussian elimination with partial
// pivoting.
double determinant(std::vector<double> a, std::size_t n) {
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (a[pivot * n + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[pivot * n + k], a[col * n + k]);
      det = -det;
    }
    const double d = a[col * n + col];
    det *= d;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / d;
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
    }
  }
  return det;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void require_orthonormal(std::span<const std::vector<double>> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i; j < v.size(); ++j) {
      const double target = i == j ? 1.0 : 0.0;
      if (std::abs(dot(v[i], v[j]) - target) > kOrthonormalTol) {
        throw NonOrthonormalInput("subspace basis is not orthonormal");
      }
    }
  }
}

}  // namespace

SpherePoint::SpherePoint(const Vec3& v) {
  const double n = kin::norm(v);
  if (!(n > 1e-300) || !std::isfinite(n)) {
    throw InvalidArgument("cannot place a zero or non-finite vector on the sphere");
  }
  v_ = v / n;
}

double ambient_distance(const ProductPoint& a, const ProductPoint& b) {
  const Vec3 d1 = a.first.vec() - b.first.vec();
  const Vec3 d2 = a.second.vec() - b.second.vec();
  return std::sqrt(dot(d1, d1) + dot(d2, d2));
}

double inner(const TangentVector& a, const TangentVector& b) {
  return dot(a.first, b.first) + dot(a.second, b.second);
}

double norm(const TangentVector& a) { return std::sqrt(inner(a, a)); }

double tangency_defect(const ProductPoint& x, const TangentVector& v) {
  return std::max(std::abs(dot(x.first.vec(), v.first)), std::abs(dot(x.second.vec(), v.second)));
}

TangentVector project_tangent(const ProductPoint& x, const TangentVector& v) {
  const Vec3& p = x.first.vec();
  const Vec3& q = x.second.vec();
  return {v.first - dot(v.first, p) * p, v.second - dot(v.second, q) * q};
}

std::array<TangentVector, 4> tangent_frame(const ProductPoint& x) {
  const Vec3& p = x.first.vec();
  const Vec3& q = x.second.vec();
  const Vec3 a1 = any_orthogonal(p);
  const Vec3 b1 = any_orthogonal(q);
  return {TangentVector{a1, {}}, TangentVector{cross(p, a1), {}}, TangentVector{{}, b1},
          TangentVector{{}, cross(q, b1)}};
}

TangentVector apply_structure(ComplexStructure s, const ProductPoint& x, const TangentVector& v) {
  TangentVector out{cross(x.first.vec(), v.first), cross(x.second.vec(), v.second)};
  if (s == ComplexStructure::JPrime) out.second = -out.second;
  return out;
}

TangentPlane::TangentPlane(const ProductPoint& base, const TangentVector& u1,
                           const TangentVector& u2)
    : base_(base), basis_{u1, u2} {
  if (std::abs(inner(u1, u1) - 1.0) > kOrthonormalTol ||
      std::abs(inner(u2, u2) - 1.0) > kOrthonormalTol ||
      std::abs(inner(u1, u2)) > kOrthonormalTol) {
    throw NonOrthonormalInput("tangent plane basis is not orthonormal");
  }
  require_tangent(base, u1);
  require_tangent(base, u2);
}

TangentPlane TangentPlane::from_spanning(const ProductPoint& base, const TangentVector& a,
                                         const TangentVector& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw DegenerateParameterization("zero spanning vector");
  }
  const TangentVector u1 = a * (1.0 / na);
  TangentVector r = b - inner(b, u1) * u1;
  double nr = norm(r);
  if (nb / std::max(nr, 1e-300) > kReorthogonalizeCondition) {
    r -= inner(r, u1) * u1;
    nr = norm(r);
  }
  if (nr / nb < std::sin(kMinSpanningAngle)) {
    throw DegenerateParameterization("spanning vectors are nearly parallel");
  }
  return TangentPlane(Unchecked{}, base, u1, r * (1.0 / nr));
}

double subspace_angle(std::span<const std::vector<double>> v, std::span<const std::vector<double>> w) {
  require_orthonormal(v);
  require_orthonormal(w);
  std::vector<std::span<const double>> all;
  for (const auto& x : v) all.emplace_back(x);
  for (const auto& x : w) all.emplace_back(x);
  if (all.empty()) return 1.0;
  const std::size_t dim = all.front().size();
  for (const auto& x : all) {
    if (x.size() != dim) throw InvalidArgument("subspace vectors differ in dimension");
  }
  if (all.size() > dim) throw InvalidArgument("p + q exceeds the ambient dimension");
  const std::size_t k = all.size();
  std::vector<double> gram(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) gram[i * k + j] = dot(all[i], all[j]);
  }
  const double det = determinant(std::move(gram), k);
  return std::clamp(std::sqrt(std::max(det, 0.0)), 0.0, 1.0);
}

double subspace_angle(const TangentPlane& v, const TangentPlane& w) {
  auto flat = [](const TangentVector& t) {
    return std::vector<double>{t.first.x, t.first.y, t.first.z, t.second.x, t.second.y, t.second.z};
  };
  const std::vector<double> vs[2] = {flat(v.u1()), flat(v.u2())};
  const std::vector<double> ws[2] = {flat(w.u1()), flat(w.u2())};
  return subspace_angle(vs, ws);
}

double kahler_cosine(const TangentPlane& p, ComplexStructure s) {
  return inner(apply_structure(s, p.base(), p.u1()), p.u2());
}

double kahler_angle(const TangentPlane& p, ComplexStructure s) {
  return std::acos(std::min(1.0, std::abs(kahler_cosine(p, s))));
}

double symplectic_form(const ProductPoint& x, const TangentVector& u, const TangentVector& v) {
  require_tangent(x, u);
  require_tangent(x, v);
  return dot(x.first.vec(), cross(u.first, v.first)) + dot(x.second.vec(), cross(u.second, v.second));
}

TangentPlane normal_plane(const TangentPlane& p) {
  const auto frame = tangent_frame(p.base());
  std::array<TangentVector, 4> r;
  for (int i = 0; i < 4; ++i) {
    r[i] = frame[i] - inner(frame[i], p.u1()) * p.u1();
    r[i] -= inner(r[i], p.u2()) * p.u2();
  }
  auto largest = [&](int skip) {
    int best = -1;
    for (int i = 0; i < 4; ++i) {
      if (i == skip) continue;
      if (best < 0 || norm(r[i]) > norm(r[best])) best = i;
    }
    return best;
  };
  const int a = largest(-1);
  const TangentVector n1 = r[a] * (1.0 / norm(r[a]));
  for (int i = 0; i < 4; ++i) {
    // two passes keep the complement orthogonal to machine precision
    for (int pass = 0; pass < 2; ++pass) {
      r[i] -= inner(r[i], n1) * n1;
      r[i] -= inner(r[i], p.u1()) * p.u1();
      r[i] -= inner(r[i], p.u2()) * p.u2();
    }
  }
  const int b = largest(a);
  const TangentVector n2 = r[b] * (1.0 / norm(r[b]));
  return TangentPlane(p.base(), n1, n2);
}

Bivector wedge(const Vec4& a, const Vec4& b) {
  Bivector out;
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) out.c[k++] = a[i] * b[j] - a[j] * b[i];
  }
  return out;
}

ProductPoint model_origin() {
  return {SpherePoint({0.0, 0.0, 1.0}), SpherePoint({0.0, 0.0, 1.0})};
}

TangentVector model_vector(const Vec4& coords) {
  const auto frame = tangent_frame(model_origin());
  TangentVector out{};
  for (int i = 0; i < 4; ++i) out += coords[i] * frame[i];
  return out;
}

}  // namespace kin
