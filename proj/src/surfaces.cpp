#include "kin/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace kin {

namespace {

constexpr double kMinCircleRadius = 1e-6;
constexpr double kNodeUnitTol = 1e-10;

// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

struct Normalized {
  Vec3 value;
  Vec3 du;
  Vec3 dv;
};

// Projects an interpolated ambient vector and its partials onto the sphere.
Normalized normalize_jet(const Vec3& p, const Vec3& pu, const Vec3& pv) {
  const double n = norm(p);
  const Vec3 unit = p / n;
  return {unit, (pu - dot(unit, pu) * unit) / n, (pv - dot(unit, pv) * unit) / n};
}

// 9-point Lagrange weights on the integer nodes -4..4.
constexpr int kHalf = 4;
constexpr int kWidth = 2 * kHalf + 1;

struct Stencil {
  long base = 0;  // node index of offset 0
  std::array<double, kWidth> w{};
  std::array<double, kWidth> dw{};  // derivative weights, already divided by h
};

const std::array<double, kWidth>& lagrange_denominators() {
  static const std::array<double, kWidth> den = [] {
    std::array<double, kWidth> d{};
    for (int j = 0; j < kWidth; ++j) {
      double p = 1.0;
      for (int i = 0; i < kWidth; ++i) {
        if (i != j) p *= static_cast<double>(j - i);
      }
      d[j] = p;
    }
    return d;
  }();
  return den;
}

Stencil make_stencil(double u, double h, bool with_derivative) {
  const double t = u / h;
  Stencil s;
  s.base = std::lround(t);
  const double x = t - static_cast<double>(s.base);
  const auto& den = lagrange_denominators();
  std::array<double, kWidth> diff{};
  for (int i = 0; i < kWidth; ++i) diff[i] = x - static_cast<double>(i - kHalf);
  for (int j = 0; j < kWidth; ++j) {
    double p = 1.0;
    for (int i = 0; i < kWidth; ++i) {
      if (i != j) p *= diff[i];
    }
    s.w[j] = p / den[j];
    if (with_derivative) {
      double d = 0.0;
      for (int k = 0; k < kWidth; ++k) {
        if (k == j) continue;
        double q = 1.0;
        for (int i = 0; i < kWidth; ++i) {
          if (i != j && i != k) q *= diff[i];
        }
        d += q;
      }
      s.dw[j] = d / den[j] / h;
    }
  }
  return s;
}

std::size_t wrap_index(long i, std::size_t m) {
  const long mm = static_cast<long>(m);
  long r = i % mm;
  if (r < 0) r += mm;
  return static_cast<std::size_t>(r);
}

}  // namespace

double area_element(const SurfaceJet& jet) {
  const double e = inner(jet.du, jet.du);
  const double g = inner(jet.dv, jet.dv);
  const double f = inner(jet.du, jet.dv);
  return std::sqrt(std::max(e * g - f * f, 0.0));
}

void Surface::check_domain(const ChartDomain& d, double& u, double& v) {
  if (!std::isfinite(u) || !std::isfinite(v)) throw OutOfDomain("non-finite surface parameter");
  auto fix = [](double& x, double lo, double hi, bool periodic) {
    if (periodic) {
      const double len = hi - lo;
      x = lo + (x - lo) - len * std::floor((x - lo) / len);
    } else if (x < lo - 1e-12 || x > hi + 1e-12) {
      throw OutOfDomain("surface parameter outside the chart domain");
    }
  };
  fix(u, d.u0, d.u1, d.periodic_u);
  fix(v, d.v0, d.v1, d.periodic_v);
}

TangentPlane Surface::tangent_plane(std::size_t chart, double u, double v) const {
  const SurfaceJet j = jet(chart, u, v);
  return TangentPlane::from_spanning(j.point, j.du, j.dv);
}

// ---------------------------------------------------------------------------

Circle::Circle(const Vec3& axis, double offset) : Circle(axis, offset, {}, {}) {}

Circle::Circle(const Vec3& axis, double offset, const Vec3& e1, const Vec3& e2) {
  const double n = norm(axis);
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("circle axis must be nonzero");
  if (!(std::abs(offset) < 1.0)) throw InvalidArgument("circle offset must lie in (-1, 1)");
  axis_ = axis / n;
  offset_ = offset;
  radius_ = std::sqrt(1.0 - offset * offset);
  if (radius_ < kMinCircleRadius) throw InvalidArgument("degenerate circle (radius < 1e-6)");
  if (e1 == Vec3{} && e2 == Vec3{}) {
    e1_ = any_orthogonal(axis_);
    e2_ = cross(axis_, e1_);
  } else {
    e1_ = e1;
    e2_ = e2;
  }
}

Vec3 Circle::point(double s) const {
  return offset_ * axis_ + radius_ * (std::cos(s) * e1_ + std::sin(s) * e2_);
}

Vec3 Circle::derivative(double s) const {
  return radius_ * (-std::sin(s) * e1_ + std::cos(s) * e2_);
}

Vec3 Circle::second_derivative(double s) const {
  return -radius_ * (std::cos(s) * e1_ + std::sin(s) * e2_);
}

Circle Circle::rotated(const Rotation& r) const {
  return Circle(r.apply(axis_), offset_, r.apply(e1_), r.apply(e2_));
}

// ---------------------------------------------------------------------------

ProductTorusSurface ProductTorusSurface::great_torus() { return latitude(0.0, 0.0); }

ProductTorusSurface ProductTorusSurface::latitude(double c1, double c2, const Vec3& axis1,
                                                  const Vec3& axis2) {
  return {Circle(axis1, c1), Circle(axis2, c2)};
}

ProductTorusSurface ProductTorusSurface::transformed(const GroupElement& g) const {
  return {c1_.rotated(g.first), c2_.rotated(g.second)};
}

SurfaceJet ProductTorusSurface::jet(std::size_t, double u, double v) const {
  check_domain(domain(0), u, v);
  return {ProductPoint{SpherePoint(c1_.point(u)), SpherePoint(c2_.point(v))},
          TangentVector{c1_.derivative(u), {}}, TangentVector{{}, c2_.derivative(v)}};
}

// ---------------------------------------------------------------------------

Vec3 GraphSurface::map(const Vec3& z) const {
  const Vec3 r = rotation_.apply(z);
  return antipodal_ ? -r : r;
}

ProductPoint GraphSurface::at(const SpherePoint& z) const {
  return {z, SpherePoint(map(z.vec()))};
}

ChartDomain GraphSurface::domain(std::size_t chart) const {
  if (chart > 1) throw OutOfDomain("graph surface has two charts");
  return {kCapRadius, kPi - kCapRadius, 0.0, kTwoPi, false, true};
}

SurfaceJet GraphSurface::jet(std::size_t chart, double u, double v) const {
  check_domain(domain(chart), u, v);
  const double st = std::sin(u), ct = std::cos(u), sp = std::sin(v), cp = std::cos(v);
  Vec3 z, zu, zv;
  if (chart == 0) {
    z = {st * cp, st * sp, ct};
    zu = {ct * cp, ct * sp, -st};
    zv = {-st * sp, st * cp, 0.0};
  } else {
    z = {ct, st * cp, st * sp};
    zu = {-st, ct * cp, ct * sp};
    zv = {0.0, -st * sp, st * cp};
  }
  return {ProductPoint{SpherePoint(z), SpherePoint(map(z))}, TangentVector{zu, map(zu)},
          TangentVector{zv, map(zv)}};
}

double GraphSurface::weight(std::size_t chart, double u, double v) const {
  const Vec3 z = jet(chart, u, v).point.first.vec();
  // distance from the z-poles, blended between 0.25 and 1.2
  const double d = std::acos(std::min(1.0, std::abs(z.z)));
  const double w = smooth_step((d - 0.25) / 0.95);
  return chart == 0 ? w : 1.0 - w;
}

// ---------------------------------------------------------------------------

MeshSurface::MeshSurface(std::size_t m, std::vector<ProductPoint> nodes)
    : m_(m), nodes_(std::move(nodes)) {
  if (m_ < 16) throw MeshFormatError("mesh resolution must be at least 16");
  if (nodes_.size() != m_ * m_) throw MeshFormatError("mesh node count must be m*m");
  raw_.resize(6 * nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Vec3& a = nodes_[k].first.vec();
    const Vec3& b = nodes_[k].second.vec();
    for (int c = 0; c < 3; ++c) {
      raw_[6 * k + c] = a[c];
      raw_[6 * k + 3 + c] = b[c];
    }
  }
}

MeshSurface MeshSurface::sample(const Surface& s, std::size_t m) {
  const ChartDomain d = s.domain(0);
  if (!d.periodic_u || !d.periodic_v) {
    throw InvalidArgument("mesh sampling needs a doubly periodic chart");
  }
  std::vector<ProductPoint> nodes;
  nodes.reserve(m * m);
  const auto us = quadrature_nodes(d.u0, d.u1, true, m);
  const auto vs = quadrature_nodes(d.v0, d.v1, true, m);
  for (double u : us) {
    for (double v : vs) nodes.push_back(s.evaluate(0, u, v));
  }
  return MeshSurface(m, std::move(nodes));
}

void MeshSurface::write(std::ostream& os) const {
  os << "mesh " << m_ << '\n' << std::setprecision(17);
  for (const auto& p : nodes_) {
    const Vec3& a = p.first.vec();
    const Vec3& b = p.second.vec();
    os << a.x << ' ' << a.y << ' ' << a.z << ' ' << b.x << ' ' << b.y << ' ' << b.z << '\n';
  }
}

MeshSurface MeshSurface::read(std::istream& is) {
  std::string word;
  long long m = 0;
  if (!(is >> word >> m) || word != "mesh" || m < 16 || m > 1 << 15) {
    throw MeshFormatError("expected header `mesh m` with m >= 16");
  }
  const auto mm = static_cast<std::size_t>(m);
  std::vector<ProductPoint> nodes;
  nodes.reserve(mm * mm);
  for (std::size_t k = 0; k < mm * mm; ++k) {
    std::array<double, 6> c{};
    for (double& x : c) {
      if (!(is >> x) || !std::isfinite(x)) {
        throw MeshFormatError("mesh line " + std::to_string(k + 2) + ": expected 6 finite numbers");
      }
    }
    const Vec3 a{c[0], c[1], c[2]};
    const Vec3 b{c[3], c[4], c[5]};
    if (std::abs(norm(a) - 1.0) > kNodeUnitTol || std::abs(norm(b) - 1.0) > kNodeUnitTol) {
      throw MeshFormatError("mesh line " + std::to_string(k + 2) + ": point not on S^2 x S^2");
    }
    nodes.push_back({SpherePoint(a), SpherePoint(b)});
  }
  std::string extra;
  if (is >> extra) throw MeshFormatError("trailing data after mesh nodes");
  return MeshSurface(mm, std::move(nodes));
}

ProductPoint MeshSurface::evaluate(std::size_t, double u, double v) const {
  check_domain(domain(0), u, v);
  const double h = spacing();
  const Stencil su = make_stencil(u, h, false);
  const Stencil sv = make_stencil(v, h, false);
  std::array<double, 6> acc{};
  for (int a = 0; a < kWidth; ++a) {
    const std::size_t i = wrap_index(su.base + a - kHalf, m_);
    std::array<double, 6> row{};
    for (int b = 0; b < kWidth; ++b) {
      const double* p = &raw_[6 * (i * m_ + wrap_index(sv.base + b - kHalf, m_))];
      for (int c = 0; c < 6; ++c) row[c] += sv.w[b] * p[c];
    }
    for (int c = 0; c < 6; ++c) acc[c] += su.w[a] * row[c];
  }
  return {SpherePoint({acc[0], acc[1], acc[2]}), SpherePoint({acc[3], acc[4], acc[5]})};
}

SurfaceJet MeshSurface::jet(std::size_t, double u, double v) const {
  check_domain(domain(0), u, v);
  const double h = spacing();
  const Stencil su = make_stencil(u, h, true);
  const Stencil sv = make_stencil(v, h, true);
  std::array<double, 6> val{}, du{}, dv{};
  for (int a = 0; a < kWidth; ++a) {
    const std::size_t i = wrap_index(su.base + a - kHalf, m_);
    std::array<double, 6> row{}, drow{};
    for (int b = 0; b < kWidth; ++b) {
      const double* p = &raw_[6 * (i * m_ + wrap_index(sv.base + b - kHalf, m_))];
      for (int c = 0; c < 6; ++c) {
        row[c] += sv.w[b] * p[c];
        drow[c] += sv.dw[b] * p[c];
      }
    }
    for (int c = 0; c < 6; ++c) {
      val[c] += su.w[a] * row[c];
      du[c] += su.dw[a] * row[c];
      dv[c] += su.w[a] * drow[c];
    }
  }
  const Normalized f = normalize_jet({val[0], val[1], val[2]}, {du[0], du[1], du[2]},
                                     {dv[0], dv[1], dv[2]});
  const Normalized s = normalize_jet({val[3], val[4], val[5]}, {du[3], du[4], du[5]},
                                     {dv[3], dv[4], dv[5]});
  return {ProductPoint{SpherePoint(f.value), SpherePoint(s.value)}, TangentVector{f.du, s.du},
          TangentVector{f.dv, s.dv}};
}

// ---------------------------------------------------------------------------

SurfaceJet TransformedSurface::jet(std::size_t chart, double u, double v) const {
  const SurfaceJet j = base_->jet(chart, u, v);
  return {apply(g_, j.point), apply_tangent(g_, j.du), apply_tangent(g_, j.dv)};
}

// ---------------------------------------------------------------------------

std::vector<double> quadrature_nodes(double lo, double hi, bool periodic, std::size_t m) {
  std::vector<double> out(m);
  const double h = (hi - lo) / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = lo + (static_cast<double>(i) + (periodic ? 0.0 : 0.5)) * h;
  }
  return out;
}

double volume(const Surface& s, std::size_t m) {
  if (m < 4) throw InvalidArgument("volume quadrature needs at least 4 points per axis");
  double total = 0.0;
  for (std::size_t c = 0; c < s.chart_count(); ++c) {
    const ChartDomain d = s.domain(c);
    const auto us = quadrature_nodes(d.u0, d.u1, d.periodic_u, m);
    const auto vs = quadrature_nodes(d.v0, d.v1, d.periodic_v, m);
    const double cell = (d.u1 - d.u0) * (d.v1 - d.v0) / static_cast<double>(m * m);
    double chart_sum = 0.0;
    for (double u : us) {
      double row = 0.0;
      for (double v : vs) {
        const double w = s.weight(c, u, v);
        if (w == 0.0) continue;
        row += w * area_element(s.jet(c, u, v));
      }
      chart_sum += row;
    }
    total += chart_sum * cell;
  }
  return total;
}

double lagrangian_defect(const Surface& s, std::size_t k) {
  const std::size_t charts = s.chart_count();
  const auto n = static_cast<std::size_t>(
      std::max(4.0, std::ceil(std::sqrt(static_cast<double>(k) / static_cast<double>(charts)))));
  double worst = 0.0;
  for (std::size_t c = 0; c < charts; ++c) {
    const ChartDomain d = s.domain(c);
    for (std::size_t i = 0; i < n; ++i) {
      // an irrational shift keeps samples off the mesh lattice
      const double fu = (static_cast<double>(i) + 0.5 + 0.318309886) / static_cast<double>(n + 1);
      const double u = d.u0 + fu * (d.u1 - d.u0);
      for (std::size_t j = 0; j < n; ++j) {
        const double fv = (static_cast<double>(j) + 0.5 + 0.141421356) / static_cast<double>(n + 1);
        const double v = d.v0 + fv * (d.v1 - d.v0);
        const TangentPlane t = s.tangent_plane(c, u, v);
        worst = std::max(worst, std::abs(symplectic_form(t.base(), t.u1(), t.u2())));
      }
    }
  }
  return worst;
}

}  // namespace kin
