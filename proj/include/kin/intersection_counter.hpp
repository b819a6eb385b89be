#pragma once

// Counting transversal intersection points of a surface N with g L, where L
// is a product of circles. Circle pairs have a closed-form count; general N
// goes through contour extraction on its parameter grid.

#include <cstddef>
#include <vector>

#include "kin/rotation_sampler.hpp"
#include "kin/surfaces.hpp"

namespace kin {

struct IntersectionResult {
  std::size_t count = 0;
  std::vector<ProductPoint> points;
  /// Smallest subspace angle between the two tangent planes at a found
  /// point (1 when there are no points).
  double min_transversality = 1.0;
};

/// Number of common points of two circles on S^2: 2, 1 or 0 by the sign of
/// D = 1 - (c1^2 + c2^2 - 2 c1 c2 gamma) / (1 - gamma^2), gamma = <n1, n2>.
/// Axes with |gamma| >= 1 - 1e-12 cut parallel planes: 0 when the planes
/// are at least 1e-9 apart, CoaxialCircles when the circles coincide.
int circle_circle_count(const Circle& c1, const Circle& c2);

/// The common points themselves (empty, one, or two).
std::vector<Vec3> circle_circle_points(const Circle& c1, const Circle& c2);

/// Product formula for two product tori; points are the Cartesian pairs.
IntersectionResult count_product_product(const ProductTorusSurface& n, const GroupElement& g,
                                         const ProductTorusSurface& l);

/// Contour-based counter for a fixed surface N sampled at grid m (and 2m for
/// the refinement check). Sampling happens once at construction; each count
/// is a pure function of (g, L).
///
/// Zeros of f1 = <first(N), g1 n1> - c1 and f2 = <second(N), g2 n2> - c2 are
/// located by marching squares on f1 = 0, sign changes of f2 along each
/// contour segment, and damped Newton refinement, then deduplicated at
/// radius 1e-6 in R^6. Grid nodes close to both zero sets that are not near
/// an accepted root seed an independent refinement: a new root there means
/// the contour missed it (GridUnstable); a near-miss within the grid's
/// curvature scale means a near-tangency (NonTransversalSample).
class ContourCounter {
 public:
  /// `surface` must outlive the counter. Requires m >= 128 unless
  /// `allow_coarse` is set (tests only).
  ContourCounter(const Surface& surface, std::size_t m, bool check_refinement = true,
                 bool allow_coarse = false);
  ~ContourCounter();
  ContourCounter(ContourCounter&&) noexcept;
  ContourCounter& operator=(ContourCounter&&) noexcept;

  /// Throws NonTransversalSample or GridUnstable as described above.
  IntersectionResult count(const GroupElement& g, const ProductTorusSurface& l) const;

  /// Single-level count without the m / 2m comparison.
  IntersectionResult count_at_level(const GroupElement& g, const ProductTorusSurface& l,
                                    int level) const;

  std::size_t grid() const noexcept { return m_; }

 private:
  struct Level;
  const Surface* surface_;
  std::size_t m_;
  bool check_refinement_;
  std::vector<Level> levels_;
};

/// One-shot convenience wrapper around ContourCounter (m >= 128).
IntersectionResult count_surface_product(const Surface& n, const GroupElement& g,
                                         const ProductTorusSurface& l, std::size_t m = 128);

}  // namespace kin
