#include "kin/rotation_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace kin {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

SplitMix64 sample_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt) {
  std::uint64_t h = mix(seed + 0x9E3779B97F4A7C15ULL);
  h = mix(h ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  h = mix(h ^ (attempt * 0xAEF17502108EF2D9ULL + 0x3C6EF372FE94F82AULL));
  return SplitMix64(h);
}

Rotation::Rotation(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("zero quaternion");
  q_ = {w / n, x / n, y / n, z / n};
}

Rotation Rotation::about_axis(const Vec3& axis, double angle) {
  const Vec3 a = normalized(axis);
  const double s = std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), s * a.x, s * a.y, s * a.z};
}

std::array<std::array<double, 3>, 3> Rotation::matrix() const {
  const auto [w, x, y, z] = q_;
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

Vec3 Rotation::apply(const Vec3& v) const {
  // v' = v + 2w (u x v) + 2 u x (u x v)
  const Vec3 u{q_[1], q_[2], q_[3]};
  const Vec3 t = 2.0 * cross(u, v);
  return v + q_[0] * t + cross(u, t);
}

Rotation Rotation::inverse() const {
  Rotation r;
  r.q_ = {q_[0], -q_[1], -q_[2], -q_[3]};
  return r;
}

double Rotation::trace() const { return 4.0 * q_[0] * q_[0] - 1.0; }

Rotation operator*(const Rotation& a, const Rotation& b) {
  const auto [aw, ax, ay, az] = a.q_;
  const auto [bw, bx, by, bz] = b.q_;
  return {aw * bw - ax * bx - ay * by - az * bz, aw * bx + ax * bw + ay * bz - az * by,
          aw * by - ax * bz + ay * bw + az * bx, aw * bz + ax * by - ay * bx + az * bw};
}

Rotation sample_haar_rotation(SplitMix64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const double w = normal(rng);
    const double x = normal(rng);
    const double y = normal(rng);
    const double z = normal(rng);
    if (w * w + x * x + y * y + z * z > 1e-200) return {w, x, y, z};
  }
}

GroupElement sample_group_element(SplitMix64& rng) {
  Rotation a = sample_haar_rotation(rng);
  Rotation b = sample_haar_rotation(rng);
  return {a, b};
}

HaarMoments haar_moments(std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("moment estimates need at least two samples");
  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
    void add(double x) {
      sum += x;
      sum_sq += x * x;
    }
    MomentEstimate finish(double n) const {
      const double mean = sum / n;
      const double var = std::max(0.0, (sum_sq - sum * mean) / (n - 1.0));
      return {mean, std::sqrt(var / n)};
    }
  } r11, tr, tr2;
  for (std::size_t i = 0; i < samples; ++i) {
    SplitMix64 rng = sample_stream(seed, i);
    const Rotation r = sample_haar_rotation(rng);
    const double a = r.matrix()[0][0];
    const double t = r.trace();
    r11.add(a * a);
    tr.add(t);
    tr2.add(t * t);
  }
  const double n = static_cast<double>(samples);
  return {r11.finish(n), tr.finish(n), tr2.finish(n)};
}

ProductPoint apply(const GroupElement& g, const ProductPoint& x) {
  return {SpherePoint(g.first.apply(x.first.vec())), SpherePoint(g.second.apply(x.second.vec()))};
}

TangentVector apply_tangent(const GroupElement& g, const TangentVector& v) {
  return {g.first.apply(v.first), g.second.apply(v.second)};
}

}  // namespace kin
