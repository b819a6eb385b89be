#include "kin/hamiltonian_flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace kin {

namespace {

constexpr double kMaxStepDisplacement = 0.5;

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

struct State {
  Vec3 p;
  Vec3 q;
};

State field(const HamiltonianFunction& h, const State& s) {
  const Ambient6 g = h.gradient({s.p.x, s.p.y, s.p.z, s.q.x, s.q.y, s.q.z});
  return {cross(Vec3{g[0], g[1], g[2]}, s.p), cross(Vec3{g[3], g[4], g[5]}, s.q)};
}

State advance(const State& s, const State& k, double c) {
  return {normalized(s.p + c * k.p), normalized(s.q + c * k.q)};
}

// Point moved along a tangent direction and pulled back onto the spheres.
ProductPoint displaced(const ProductPoint& x, const TangentVector& v, double eps) {
  return {SpherePoint(x.first.vec() + eps * v.first), SpherePoint(x.second.vec() + eps * v.second)};
}

}  // namespace

Ambient6 ambient(const ProductPoint& x) {
  const Vec3& a = x.first.vec();
  const Vec3& b = x.second.vec();
  return {a.x, a.y, a.z, b.x, b.y, b.z};
}

int Monomial::degree() const {
  int d = 0;
  for (auto e : exponents) d += e;
  return d;
}

HamiltonianFunction::HamiltonianFunction(std::vector<Monomial> terms) {
  std::map<std::array<std::uint8_t, 6>, double> merged;
  for (const auto& t : terms) merged[t.exponents] += t.coefficient;
  for (const auto& [e, c] : merged) {
    if (c == 0.0) continue;
    Monomial m{c, e};
    if (m.degree() > kMaxDegree) {
      throw DegreeTooHigh("Hamiltonian monomial of degree " + std::to_string(m.degree()) +
                          " exceeds 3");
    }
    terms_.push_back(m);
  }
}

double HamiltonianFunction::value(const Ambient6& x) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    double v = t.coefficient;
    for (int i = 0; i < 6; ++i) v *= ipow(x[i], t.exponents[i]);
    s += v;
  }
  return s;
}

Ambient6 HamiltonianFunction::gradient(const Ambient6& x) const {
  Ambient6 g{};
  for (const auto& t : terms_) {
    for (int k = 0; k < 6; ++k) {
      if (t.exponents[k] == 0) continue;
      double v = t.coefficient * t.exponents[k];
      for (int i = 0; i < 6; ++i) v *= ipow(x[i], t.exponents[i] - (i == k ? 1 : 0));
      g[k] += v;
    }
  }
  return g;
}

TangentVector hamiltonian_vector_field(const HamiltonianFunction& h, const ProductPoint& x) {
  const State k = field(h, {x.first.vec(), x.second.vec()});
  return {k.p, k.q};
}

void FlowParams::validate() const {
  if (steps < 16) throw InvalidArgument("flow needs at least 16 steps");
  if (!std::isfinite(time) || std::abs(dt()) > 0.05) {
    throw InvalidArgument("flow step |dt| must not exceed 0.05");
  }
}

FlowParams FlowParams::with_max_step(double time, double max_dt) {
  const int n = std::max(16, static_cast<int>(std::ceil(std::abs(time) / max_dt - 1e-12)));
  return {time, n};
}

ProductPoint flow_point(const HamiltonianFunction& h, const ProductPoint& x,
                        const FlowParams& params) {
  params.validate();
  if (h.is_zero() || params.time == 0.0) return x;
  const double dt = params.dt();
  State s{x.first.vec(), x.second.vec()};
  for (int n = 0; n < params.steps; ++n) {
    const State k1 = field(h, s);
    const State k2 = field(h, advance(s, k1, 0.5 * dt));
    const State k3 = field(h, advance(s, k2, 0.5 * dt));
    const State k4 = field(h, advance(s, k3, dt));
    const State incr{(k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p) * (dt / 6.0),
                     (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q) * (dt / 6.0)};
    if (std::sqrt(dot(incr.p, incr.p) + dot(incr.q, incr.q)) > kMaxStepDisplacement) {
      throw StepSizeTooLarge("a single flow step moved the point more than 0.5");
    }
    s = {normalized(s.p + incr.p), normalized(s.q + incr.q)};
  }
  return {SpherePoint(s.p), SpherePoint(s.q)};
}

MeshSurface deform_surface(const HamiltonianFunction& h, const ProductTorusSurface& s,
                           const FlowParams& params, std::size_t m) {
  if (m < 64) throw InvalidArgument("deformed meshes need m >= 64");
  params.validate();
  const auto us = quadrature_nodes(0.0, kTwoPi, true, m);
  std::vector<ProductPoint> nodes;
  nodes.reserve(m * m);
  for (double u : us) {
    for (double v : us) nodes.push_back(flow_point(h, s.evaluate(0, u, v), params));
  }
  return MeshSurface(m, std::move(nodes));
}

double symplectic_pullback_error(const HamiltonianFunction& h, const FlowParams& params,
                                 const ProductPoint& x, const TangentVector& u,
                                 const TangentVector& v, double eps) {
  const ProductPoint end = flow_point(h, x, params);
  auto push = [&](const TangentVector& w) {
    const Ambient6 plus = ambient(flow_point(h, displaced(x, w, eps), params));
    const Ambient6 minus = ambient(flow_point(h, displaced(x, w, -eps), params));
    TangentVector d{{(plus[0] - minus[0]) / (2 * eps), (plus[1] - minus[1]) / (2 * eps),
                     (plus[2] - minus[2]) / (2 * eps)},
                    {(plus[3] - minus[3]) / (2 * eps), (plus[4] - minus[4]) / (2 * eps),
                     (plus[5] - minus[5]) / (2 * eps)}};
    return project_tangent(end, d);
  };
  const TangentVector tu = project_tangent(x, u);
  const TangentVector tv = project_tangent(x, v);
  return std::abs(symplectic_form(end, push(tu), push(tv)) - symplectic_form(x, tu, tv));
}

}  // namespace kin
