#pragma once

// Haar sampling on SO(3) and G = SO(3) x SO(3), the G-action on S^2 x S^2 and
// the unnormalized volume constants used by every integral in the library.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

#include "kin/geometry_core.hpp"
#include "kin/vec.hpp"

namespace kin {

/// Riemannian volumes with G/K isometric to the product of unit spheres.
struct MeasureConstants {
  static constexpr double vol_so3 = 8.0 * kPi * kPi;
  static constexpr double vol_g = vol_so3 * vol_so3;  // 64 pi^4
  static constexpr double vol_k = 4.0 * kPi * kPi;    // (2 pi)^2
  static constexpr double vol_gk = 16.0 * kPi * kPi;  // area of S^2 x S^2
};

/// SplitMix64 as a UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Counter-based stream: the generator for sample `index` (and retry
/// `attempt`) depends only on (seed, index, attempt), never on evaluation order.
SplitMix64 sample_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt = 0);

/// Rotation stored as a unit quaternion (w, x, y, z).
class Rotation {
 public:
  Rotation() = default;
  /// Normalizes the quaternion; throws InvalidArgument for a zero quaternion.
  Rotation(double w, double x, double y, double z);

  static Rotation identity() { return {}; }
  /// Right-handed rotation by `angle` about `axis`.
  static Rotation about_axis(const Vec3& axis, double angle);

  const std::array<double, 4>& quaternion() const noexcept { return q_; }
  std::array<std::array<double, 3>, 3> matrix() const;

  Vec3 apply(const Vec3& v) const;
  Rotation inverse() const;
  double trace() const;

  friend Rotation operator*(const Rotation& a, const Rotation& b);

 private:
  std::array<double, 4> q_{1.0, 0.0, 0.0, 0.0};
};

/// Element of G = SO(3) x SO(3).
struct GroupElement {
  Rotation first;
  Rotation second;

  static GroupElement identity() { return {}; }
  GroupElement inverse() const { return {first.inverse(), second.inverse()}; }
  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    return {a.first * b.first, a.second * b.second};
  }
};

/// Haar-uniform rotation: four independent standard normals normalized to a
/// unit quaternion.
Rotation sample_haar_rotation(SplitMix64& rng);

GroupElement sample_group_element(SplitMix64& rng);

/// Sample mean and standard error of one scalar statistic.
struct MomentEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

/// Moments of Haar rotations drawn from streams (seed, i) for i < samples.
/// Exact values: E[R11^2] = 1/3, E[tr R] = 0, E[(tr R)^2] = 1.
struct HaarMoments {
  MomentEstimate r11_squared;
  MomentEstimate trace;
  MomentEstimate trace_squared;
};

HaarMoments haar_moments(std::size_t samples, std::uint64_t seed);

ProductPoint apply(const GroupElement& g, const ProductPoint& x);
TangentVector apply_tangent(const GroupElement& g, const TangentVector& v);

}  // namespace kin
