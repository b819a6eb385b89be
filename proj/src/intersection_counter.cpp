#include "kin/intersection_counter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

namespace kin {

namespace {

constexpr double kCoaxialTol = 1e-12;
constexpr double kCoincidentTol = 1e-9;
constexpr double kAcceptResidual = 1e-10;
constexpr double kDedupRadius = 1e-6;
constexpr double kTransversalityFloor = 1e-8;
constexpr double kSeedBand = 2.0;
constexpr double kSeedExclusionCells = 1.5;
constexpr double kNearMissFactor = 1.0;
constexpr std::size_t kMaxSeedSolves = 512;

TangentPlane circle_pair_plane(const ProductPoint& x, const Vec3& axis1, const Vec3& axis2) {
  const TangentVector t1{normalized(cross(axis1, x.first.vec())), {}};
  const TangentVector t2{{}, normalized(cross(axis2, x.second.vec()))};
  return TangentPlane(x, t1, t2);
}

// Zero sets of f1 = <p, a1> - c1 and f2 = <q, a2> - c2 for one group element.
struct Targets {
  Vec3 a1;
  double c1;
  Vec3 a2;
  double c2;
};

Targets make_targets(const GroupElement& g, const ProductTorusSurface& l) {
  return {g.first.apply(l.circle1().axis()), l.circle1().offset(),
          g.second.apply(l.circle2().axis()), l.circle2().offset()};
}

struct Root {
  std::size_t chart;
  double u;
  double v;
  ProductPoint point;
};

struct SolveResult {
  double u = 0.0;
  double v = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  bool converged = false;
  bool left_domain = false;
};

bool inside(const ChartDomain& d, double u, double v) {
  if (!std::isfinite(u) || !std::isfinite(v)) return false;
  if (!d.periodic_u && (u < d.u0 || u > d.u1)) return false;
  if (!d.periodic_v && (v < d.v0 || v > d.v1)) return false;
  return true;
}

double wrap(double x, double lo, double hi) {
  const double len = hi - lo;
  double r = std::fmod(x - lo, len);
  if (r < 0.0) r += len;
  return lo + r;
}

// Damped Gauss-Newton (Levenberg-Marquardt) on F(u, v) = (f1, f2). With the
// damping at zero this is Newton's method; near a fold it settles on the
// local minimum of |F|.
SolveResult solve(const Surface& s, std::size_t chart, const ChartDomain& d, const Targets& t,
                  double u, double v) {
  struct Eval {
    double f1, f2;
    double j11, j12, j21, j22;
  };
  auto eval = [&](double uu, double vv) -> std::optional<Eval> {
    if (!inside(d, uu, vv)) return std::nullopt;
    const SurfaceJet jet = s.jet(chart, uu, vv);
    return Eval{dot(jet.point.first.vec(), t.a1) - t.c1, dot(jet.point.second.vec(), t.a2) - t.c2,
                dot(jet.du.first, t.a1),  dot(jet.dv.first, t.a1),
                dot(jet.du.second, t.a2), dot(jet.dv.second, t.a2)};
  };

  SolveResult out;
  auto e = eval(u, v);
  if (!e) {
    out.left_domain = true;
    return out;
  }
  double lambda = 0.0;
  double r2 = e->f1 * e->f1 + e->f2 * e->f2;
  for (int it = 0; it < 80; ++it) {
    if (std::max(std::abs(e->f1), std::abs(e->f2)) <= 1e-14) break;
    const double a11 = e->j11 * e->j11 + e->j21 * e->j21;
    const double a12 = e->j11 * e->j12 + e->j21 * e->j22;
    const double a22 = e->j12 * e->j12 + e->j22 * e->j22;
    const double b1 = -(e->j11 * e->f1 + e->j21 * e->f2);
    const double b2 = -(e->j12 * e->f1 + e->j22 * e->f2);
    const double mu = lambda * (a11 + a22);
    const double m11 = a11 + mu, m22 = a22 + mu;
    const double det = m11 * m22 - a12 * a12;
    if (!(std::abs(det) > 1e-300)) {
      lambda = std::max(lambda * 10.0, 1e-8);
      if (lambda > 1e10) break;
      continue;
    }
    const double du = (m22 * b1 - a12 * b2) / det;
    const double dv = (m11 * b2 - a12 * b1) / det;
    const auto next = eval(u + du, v + dv);
    const double nr2 = next ? next->f1 * next->f1 + next->f2 * next->f2 : r2 + 1.0;
    if (next && nr2 < r2) {
      u += du;
      v += dv;
      e = next;
      r2 = nr2;
      lambda = lambda < 1e-9 ? 0.0 : lambda * 0.1;
      if (std::hypot(du, dv) < 1e-15) break;
    } else {
      lambda = std::max(lambda * 10.0, 1e-8);
      if (lambda > 1e10) break;
    }
  }
  if (d.periodic_u) u = wrap(u, d.u0, d.u1);
  if (d.periodic_v) v = wrap(v, d.v0, d.v1);
  out.u = u;
  out.v = v;
  out.f1 = e->f1;
  out.f2 = e->f2;
  out.converged = std::max(std::abs(e->f1), std::abs(e->f2)) <= kAcceptResidual;
  return out;
}

double jacobian_min_singular(const Surface& s, std::size_t chart, double u, double v,
                             const Targets& t) {
  const SurfaceJet jet = s.jet(chart, u, v);
  const double j11 = dot(jet.du.first, t.a1), j12 = dot(jet.dv.first, t.a1);
  const double j21 = dot(jet.du.second, t.a2), j22 = dot(jet.dv.second, t.a2);
  const double fro = j11 * j11 + j12 * j12 + j21 * j21 + j22 * j22;
  const double det = std::abs(j11 * j22 - j12 * j21);
  const double smax = std::sqrt(0.5 * (fro + std::sqrt(std::max(0.0, fro * fro - 4.0 * det * det))));
  return smax > 0.0 ? det / smax : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------

int circle_circle_count(const Circle& a, const Circle& b) {
  const double gamma = dot(a.axis(), b.axis());
  const double c1 = a.offset(), c2 = b.offset();
  if (std::abs(gamma) >= 1.0 - kCoaxialTol) {
    // Parallel planes: disjoint unless they are the same plane.
    if (std::abs(c1 - std::copysign(1.0, gamma) * c2) > kCoincidentTol) return 0;
    throw CoaxialCircles("circles coincide");
  }
  const double d = 1.0 - (c1 * c1 + c2 * c2 - 2.0 * c1 * c2 * gamma) / (1.0 - gamma * gamma);
  if (d > 0.0) return 2;
  if (d == 0.0) return 1;
  return 0;
}

std::vector<Vec3> circle_circle_points(const Circle& a, const Circle& b) {
  const int n = circle_circle_count(a, b);
  if (n == 0) return {};
  const Vec3& n1 = a.axis();
  const Vec3& n2 = b.axis();
  const double gamma = dot(n1, n2);
  const double den = 1.0 - gamma * gamma;
  const double c1 = a.offset(), c2 = b.offset();
  const double alpha = (c1 - gamma * c2) / den;
  const double beta = (c2 - gamma * c1) / den;
  const double d = 1.0 - (c1 * c1 + c2 * c2 - 2.0 * c1 * c2 * gamma) / den;
  const double mu = std::sqrt(std::max(0.0, d / den));
  const Vec3 base = alpha * n1 + beta * n2;
  const Vec3 k = cross(n1, n2);
  if (n == 1) return {normalized(base)};
  return {normalized(base + mu * k), normalized(base - mu * k)};
}

IntersectionResult count_product_product(const ProductTorusSurface& n, const GroupElement& g,
                                         const ProductTorusSurface& l) {
  const Circle m1 = l.circle1().rotated(g.first);
  const Circle m2 = l.circle2().rotated(g.second);
  const auto ps = circle_circle_points(n.circle1(), m1);
  const auto qs = circle_circle_points(n.circle2(), m2);
  IntersectionResult r;
  r.count = ps.size() * qs.size();
  for (const auto& p : ps) {
    for (const auto& q : qs) {
      const ProductPoint x{SpherePoint(p), SpherePoint(q)};
      r.points.push_back(x);
      const double angle = subspace_angle(circle_pair_plane(x, n.circle1().axis(), n.circle2().axis()),
                                          circle_pair_plane(x, m1.axis(), m2.axis()));
      r.min_transversality = std::min(r.min_transversality, angle);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Node samples of one chart. Node (i, j) sits at (u0 + i hu, v0 + j hv) and
// is stored at i * nv + j; periodic axes have m nodes, closed ones m + 1.
struct ChartGrid {
  std::size_t chart = 0;
  ChartDomain d;
  std::size_t nu = 0, nv = 0;  // node counts
  std::size_t cu = 0, cv = 0;  // cell counts
  double hu = 0.0, hv = 0.0;
  std::vector<double> x1, y1, z1, x2, y2, z2;
  // Largest step to a neighbor and second-difference bound of each factor;
  // since the axes are unit vectors they bound the corresponding differences
  // of f1 and f2.
  std::vector<double> step1, step2, curv1, curv2;

  std::size_t next_u(std::size_t i) const { return i + 1 == nu ? 0 : i + 1; }
  std::size_t next_v(std::size_t j) const { return j + 1 == nv ? 0 : j + 1; }
  double u_at(double i) const { return d.u0 + i * hu; }
  double v_at(double j) const { return d.v0 + j * hv; }
};

ChartGrid build_grid(const Surface& s, std::size_t chart, std::size_t m) {
  ChartGrid g;
  g.chart = chart;
  g.d = s.domain(chart);
  g.nu = g.d.periodic_u ? m : m + 1;
  g.nv = g.d.periodic_v ? m : m + 1;
  g.cu = m;
  g.cv = m;
  g.hu = (g.d.u1 - g.d.u0) / static_cast<double>(m);
  g.hv = (g.d.v1 - g.d.v0) / static_cast<double>(m);
  const std::size_t total = g.nu * g.nv;
  std::vector<Vec3> p1(total), p2(total);
  for (std::size_t i = 0; i < g.nu; ++i) {
    for (std::size_t j = 0; j < g.nv; ++j) {
      const ProductPoint x = s.evaluate(chart, g.u_at(static_cast<double>(i)), g.v_at(static_cast<double>(j)));
      p1[i * g.nv + j] = x.first.vec();
      p2[i * g.nv + j] = x.second.vec();
    }
  }
  for (auto* v : {&g.x1, &g.y1, &g.z1, &g.x2, &g.y2, &g.z2, &g.step1, &g.step2, &g.curv1, &g.curv2}) {
    v->assign(total, 0.0);
  }
  for (std::size_t k = 0; k < total; ++k) {
    g.x1[k] = p1[k].x;
    g.y1[k] = p1[k].y;
    g.z1[k] = p1[k].z;
    g.x2[k] = p2[k].x;
    g.y2[k] = p2[k].y;
    g.z2[k] = p2[k].z;
  }
  // Neighbor along an axis, wrapped for periodic axes and clamped otherwise.
  auto nb = [](std::size_t i, int di, std::size_t n, bool periodic) -> std::size_t {
    const long k = static_cast<long>(i) + di;
    if (periodic) return static_cast<std::size_t>((k + static_cast<long>(n)) % static_cast<long>(n));
    return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(n) - 1));
  };
  auto interior = [](std::size_t i, std::size_t n, bool periodic) -> std::size_t {
    if (periodic) return i;
    return std::clamp<std::size_t>(i, 1, n - 2);
  };
  auto id = [&g](std::size_t i, std::size_t j) { return i * g.nv + j; };
  for (std::size_t i = 0; i < g.nu; ++i) {
    for (std::size_t j = 0; j < g.nv; ++j) {
      const std::size_t k = id(i, j);
      double s1 = 0.0, s2 = 0.0;
      for (int di : {-1, 1}) {
        const std::size_t a = id(nb(i, di, g.nu, g.d.periodic_u), j);
        const std::size_t b = id(i, nb(j, di, g.nv, g.d.periodic_v));
        s1 = std::max({s1, norm(p1[a] - p1[k]), norm(p1[b] - p1[k])});
        s2 = std::max({s2, norm(p2[a] - p2[k]), norm(p2[b] - p2[k])});
      }
      g.step1[k] = s1;
      g.step2[k] = s2;
      const std::size_t ic = interior(i, g.nu, g.d.periodic_u);
      const std::size_t jc = interior(j, g.nv, g.d.periodic_v);
      const std::size_t cu0 = id(ic, j);
      const std::size_t cum = id(nb(ic, -1, g.nu, g.d.periodic_u), j);
      const std::size_t cup = id(nb(ic, 1, g.nu, g.d.periodic_u), j);
      const std::size_t cv0 = id(i, jc);
      const std::size_t cvm = id(i, nb(jc, -1, g.nv, g.d.periodic_v));
      const std::size_t cvp = id(i, nb(jc, 1, g.nv, g.d.periodic_v));
      g.curv1[k] = std::max(norm(p1[cup] - 2.0 * p1[cu0] + p1[cum]), norm(p1[cvp] - 2.0 * p1[cv0] + p1[cvm]));
      g.curv2[k] = std::max(norm(p2[cup] - 2.0 * p2[cu0] + p2[cum]), norm(p2[cvp] - 2.0 * p2[cv0] + p2[cvm]));
    }
  }
  return g;
}

// Parameter distance in units of cells, honoring periodicity.
double cell_distance(const ChartGrid& g, double u1, double v1, double u2, double v2) {
  double du = std::abs(u1 - u2);
  double dv = std::abs(v1 - v2);
  if (g.d.periodic_u) du = std::min(du, (g.d.u1 - g.d.u0) - du);
  if (g.d.periodic_v) dv = std::min(dv, (g.d.v1 - g.d.v0) - dv);
  return std::max(du / g.hu, dv / g.hv);
}

// Level-set values of one chart, reused across calls on the same thread.
struct ChartValues {
  std::vector<double> f1;
  std::vector<std::size_t> near;  // nodes with |f1| within the seed band
  std::vector<std::uint32_t> stamp;  // per cell, marks cells already queued
  std::uint32_t generation = 0;
};

void evaluate_first(const ChartGrid& g, const Targets& t, ChartValues& out) {
  const std::size_t total = g.x1.size();
  if (out.f1.size() != total) {
    out.f1.assign(total, 0.0);
    out.stamp.assign(total, 0);
    out.generation = 0;
  }
  const double* x1 = g.x1.data();
  const double* y1 = g.y1.data();
  const double* z1 = g.z1.data();
  double* f1 = out.f1.data();
  const double ax = t.a1.x, ay = t.a1.y, az = t.a1.z, c1 = t.c1;
  for (std::size_t k = 0; k < total; ++k) f1[k] = ax * x1[k] + ay * y1[k] + az * z1[k] - c1;
  if (++out.generation == 0) {
    std::fill(out.stamp.begin(), out.stamp.end(), 0);
    out.generation = 1;
  }
}

double second_level(const ChartGrid& g, const Targets& t, std::size_t k) {
  return t.a2.x * g.x2[k] + t.a2.y * g.y2[k] + t.a2.z * g.z2[k] - t.c2;
}

}  // namespace

struct ContourCounter::Level {
  std::vector<ChartGrid> charts;
};

ContourCounter::ContourCounter(const Surface& surface, std::size_t m, bool check_refinement,
                               bool allow_coarse)
    : surface_(&surface), m_(m), check_refinement_(check_refinement) {
  if (m < 128 && !allow_coarse) throw InvalidArgument("contour grid must be at least 128");
  if (m < 8) throw InvalidArgument("contour grid must be at least 8");
  const int nlevels = check_refinement ? 2 : 1;
  for (int lv = 0; lv < nlevels; ++lv) {
    Level level;
    for (std::size_t c = 0; c < surface.chart_count(); ++c) {
      level.charts.push_back(build_grid(surface, c, m << lv));
    }
    levels_.push_back(std::move(level));
  }
}

ContourCounter::~ContourCounter() = default;
ContourCounter::ContourCounter(ContourCounter&&) noexcept = default;
ContourCounter& ContourCounter::operator=(ContourCounter&&) noexcept = default;

IntersectionResult ContourCounter::count(const GroupElement& g, const ProductTorusSurface& l) const {
  IntersectionResult coarse = count_at_level(g, l, 0);
  if (!check_refinement_) return coarse;
  const IntersectionResult fine = count_at_level(g, l, 1);
  if (fine.count != coarse.count) {
    throw GridUnstable("intersection count changed under grid refinement (" +
                       std::to_string(coarse.count) + " vs " + std::to_string(fine.count) + ")");
  }
  return coarse;
}

IntersectionResult ContourCounter::count_at_level(const GroupElement& g, const ProductTorusSurface& l,
                                                  int level) const {
  if (level < 0 || static_cast<std::size_t>(level) >= levels_.size()) {
    throw InvalidArgument("contour level not sampled");
  }
  const Surface& s = *surface_;
  const Targets t = make_targets(g, l);
  const Level& lv = levels_[static_cast<std::size_t>(level)];

  std::vector<Root> roots;
  auto known = [&](const ProductPoint& x) {
    for (const auto& r : roots) {
      if (ambient_distance(r.point, x) < kDedupRadius) return true;
    }
    return false;
  };
  auto accept = [&](const ChartGrid& grid, const SolveResult& sr) -> bool {
    if (!sr.converged) return false;
    const ProductPoint x = s.evaluate(grid.chart, sr.u, sr.v);
    if (known(x)) return false;
    roots.push_back({grid.chart, sr.u, sr.v, x});
    return true;
  };

  // One buffer set per (level, chart) so sizes stay fixed across calls.
  thread_local std::vector<ChartValues> value_store;
  const std::size_t base = static_cast<std::size_t>(level) * lv.charts.size();
  if (value_store.size() < base + lv.charts.size()) value_store.resize(base + lv.charts.size());
  ChartValues* values = value_store.data() + base;
  thread_local std::vector<std::size_t> near;
  thread_local std::vector<std::size_t> cells;

  for (std::size_t c = 0; c < lv.charts.size(); ++c) {
    const ChartGrid& grid = lv.charts[c];
    ChartValues& val = values[c];
    evaluate_first(grid, t, val);
    const double* f1 = val.f1.data();
    auto f2 = [&grid, &t](std::size_t k) { return second_level(grid, t, k); };
    const double* step1 = grid.step1.data();
    const std::size_t total = grid.nu * grid.nv;

    // A cell can only contain a sign change of f1 if one of its corners lies
    // within one neighbor step of zero.
    near.clear();
    for (std::size_t k = 0; k < total; ++k) {
      if (std::abs(f1[k]) <= kSeedBand * step1[k]) near.push_back(k);
    }
    val.near.assign(near.begin(), near.end());
    cells.clear();
    for (std::size_t k : near) {
      if (std::abs(f1[k]) > step1[k]) continue;
      const std::size_t i = k / grid.nv, j = k % grid.nv;
      for (int di = -1; di <= 0; ++di) {
        std::size_t ci = i;
        if (di < 0) {
          if (i > 0) {
            ci = i - 1;
          } else if (grid.d.periodic_u) {
            ci = grid.nu - 1;
          } else {
            continue;
          }
        }
        if (ci >= grid.cu) continue;
        for (int dj = -1; dj <= 0; ++dj) {
          std::size_t cj = j;
          if (dj < 0) {
            if (j > 0) {
              cj = j - 1;
            } else if (grid.d.periodic_v) {
              cj = grid.nv - 1;
            } else {
              continue;
            }
          }
          if (cj >= grid.cv) continue;
          const std::size_t cell = ci * grid.nv + cj;
          if (val.stamp[cell] == val.generation) continue;
          val.stamp[cell] = val.generation;
          cells.push_back(cell);
        }
      }
    }

    // Marching squares on f1; each contour segment is tested for a sign
    // change of f2, which brackets a common zero.
    struct Crossing {
      double u, v, f2;
    };
    // Crossing on the edge from node (ia, ja) to its neighbor (ia + di, ja + dj).
    auto crossing = [&](std::size_t ia, std::size_t ja, std::size_t di, std::size_t dj) {
      const std::size_t ib = di ? grid.next_u(ia) : ia;
      const std::size_t jb = dj ? grid.next_v(ja) : ja;
      const std::size_t ka = ia * grid.nv + ja, kb = ib * grid.nv + jb;
      const double w = f1[ka] / (f1[ka] - f1[kb]);
      const double ua = grid.u_at(static_cast<double>(ia));
      const double va = grid.v_at(static_cast<double>(ja));
      return Crossing{ua + w * static_cast<double>(di) * grid.hu, va + w * static_cast<double>(dj) * grid.hv,
                      f2(ka) + w * (f2(kb) - f2(ka))};
    };
    auto try_segment = [&](const Crossing& a, const Crossing& b) {
      if ((a.f2 >= 0.0) == (b.f2 >= 0.0)) return;
      const double w = a.f2 / (a.f2 - b.f2);
      accept(grid, solve(s, grid.chart, grid.d, t, a.u + w * (b.u - a.u), a.v + w * (b.v - a.v)));
    };

    for (std::size_t cell : cells) {
      const std::size_t i = cell / grid.nv, j = cell % grid.nv;
      const std::size_t i1 = grid.next_u(i), j1 = grid.next_v(j);
      const double c00 = f1[i * grid.nv + j], c10 = f1[i1 * grid.nv + j];
      const double c11 = f1[i1 * grid.nv + j1], c01 = f1[i * grid.nv + j1];
      const bool s00 = c00 >= 0.0, s10 = c10 >= 0.0, s11 = c11 >= 0.0, s01 = c01 >= 0.0;
      if (s00 == s10 && s10 == s11 && s11 == s01) continue;
      // Edges: 0 bottom (00-10), 1 right (10-11), 2 top (01-11), 3 left (00-01).
      std::optional<Crossing> e[4];
      if (s00 != s10) e[0] = crossing(i, j, 1, 0);
      if (s10 != s11) e[1] = crossing(i1, j, 0, 1);
      if (s01 != s11) e[2] = crossing(i, j1, 1, 0);
      if (s00 != s01) e[3] = crossing(i, j, 0, 1);
      if (e[1]) e[1]->u = grid.u_at(static_cast<double>(i) + 1.0);
      if (e[2]) e[2]->v = grid.v_at(static_cast<double>(j) + 1.0);
      int present = 0;
      for (const auto& x : e) present += x.has_value();
      if (present == 2) {
        const Crossing* pair[2];
        int n = 0;
        for (const auto& x : e) {
          if (x) pair[n++] = &*x;
        }
        try_segment(*pair[0], *pair[1]);
      } else {
        const bool center = 0.25 * (c00 + c10 + c11 + c01) >= 0.0;
        if (center == s00) {
          try_segment(*e[0], *e[1]);
          try_segment(*e[2], *e[3]);
        } else {
          try_segment(*e[0], *e[3]);
          try_segment(*e[1], *e[2]);
        }
      }
    }
  }

  // Independent pass over nodes near both zero sets.
  std::size_t solves = 0;
  for (std::size_t c = 0; c < lv.charts.size(); ++c) {
    const ChartGrid& grid = lv.charts[c];
    std::vector<std::pair<double, double>> tried;
    for (std::size_t k : values[c].near) {
      if (std::abs(second_level(grid, t, k)) > kSeedBand * grid.step2[k]) continue;
      const std::size_t i = k / grid.nv, j = k % grid.nv;
      const double u = grid.u_at(static_cast<double>(i)), v = grid.v_at(static_cast<double>(j));
      bool skip = false;
      for (const auto& r : roots) {
        if (r.chart == c && cell_distance(grid, u, v, r.u, r.v) <= kSeedExclusionCells) {
          skip = true;
          break;
        }
      }
      for (const auto& [tu, tv] : tried) {
        if (skip) break;
        if (cell_distance(grid, u, v, tu, tv) <= kSeedExclusionCells) skip = true;
      }
      if (skip) continue;
      tried.emplace_back(u, v);
      if (++solves > kMaxSeedSolves) {
        throw NonTransversalSample("degenerate configuration: too many candidate regions");
      }
      const SolveResult sr = solve(s, c, grid.d, t, u, v);
      if (sr.left_domain) continue;
      if (sr.converged) {
        if (accept(grid, sr)) throw GridUnstable("contour extraction missed an intersection point");
        continue;
      }
      // Near miss: the residual at the local minimum of |F| is within the
      // grid's curvature scale, so a pair of roots could hide in one cell.
      if (!inside(grid.d, sr.u, sr.v)) continue;
      const double fi = (sr.u - grid.d.u0) / grid.hu, fj = (sr.v - grid.d.v0) / grid.hv;
      std::size_t ni = static_cast<std::size_t>(std::llround(std::max(0.0, fi)));
      std::size_t nj = static_cast<std::size_t>(std::llround(std::max(0.0, fj)));
      ni = grid.d.periodic_u ? ni % grid.nu : std::min(ni, grid.nu - 1);
      nj = grid.d.periodic_v ? nj % grid.nv : std::min(nj, grid.nv - 1);
      const std::size_t kn = ni * grid.nv + nj;
      if (std::abs(sr.f1) <= kNearMissFactor * grid.curv1[kn] &&
          std::abs(sr.f2) <= kNearMissFactor * grid.curv2[kn]) {
        throw NonTransversalSample("near-tangential configuration");
      }
    }
  }

  IntersectionResult result;
  result.count = roots.size();
  for (const auto& r : roots) {
    const SurfaceJet jet = s.jet(r.chart, r.u, r.v);
    if (jacobian_min_singular(s, r.chart, r.u, r.v, t) <= kTransversalityFloor) {
      throw NonTransversalSample("singular intersection Jacobian");
    }
    const TangentPlane tn = TangentPlane::from_spanning(jet.point, jet.du, jet.dv);
    const double angle = subspace_angle(tn, circle_pair_plane(jet.point, t.a1, t.a2));
    if (angle <= kTransversalityFloor) throw NonTransversalSample("tangential intersection");
    result.min_transversality = std::min(result.min_transversality, angle);
    result.points.push_back(r.point);
  }
  return result;
}

IntersectionResult count_surface_product(const Surface& n, const GroupElement& g,
                                         const ProductTorusSurface& l, std::size_t m) {
  return ContourCounter(n, m).count(g, l);
}

}  // namespace kin
