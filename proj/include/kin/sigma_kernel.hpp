#pragma once

// The angle kernel sigma_K on pairs of 2-planes in T_o(S^2 x S^2).
//
// A plane is classified up to the isotropy torus K = SO(2) x SO(2) by two
// angles. With u'_1 = sin t1 e1 + cos t1 e3, u'_2 = sin t2 e2 + cos t2 e4
// spanning the tangent plane of the first surface and
// v_1 = cos s1 e1 - sin s1 e3, v_2 = cos s2 e2 - sin s2 e4 spanning the normal
// plane of the second, the kernel is the average of
// |<a(u'_1 ^ u'_2), b(v_1 ^ v_2)>| over the two K-rotations a, b,
// unnormalized so K has mass (2 pi)^2.

#include <utility>

#include "kin/geometry_core.hpp"

namespace kin {

/// Canonical angles (theta1, theta2) of the first plane and (tau1, tau2) of
/// the second. The K-orbit space is the cell 0 <= theta1 +- theta2 <= pi;
/// the kernel itself is defined for all real values.
struct CellInvariants {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;

  bool in_fundamental_cell(double tol = 1e-12) const;
};

struct EllipseSemiaxes {
  double a = 0.0;
  double b = 0.0;
};

/// Arc length of x^2/a^2 + y^2/b^2 = 1 by the arithmetic-geometric mean.
/// Degenerate ellipses (smaller semiaxis < 1e-8) return the limit 4 max(a, b).
/// Throws NegativeAxis.
double ellipse_perimeter(double a, double b);

/// Same quantity by adaptive Gauss-Kronrod quadrature of
/// 4 int_0^{pi/2} sqrt(a^2 cos^2 t + b^2 sin^2 t) dt.
double ellipse_perimeter_quadrature(double a, double b);

/// Kernel at arbitrary invariants. The psi-average of |alpha + rho cos psi|
/// is done in closed form; the phi-integral by adaptive Gauss-Kronrod
/// (target 1e-12 relative). Throws QuadratureNotConverged when the
/// Gauss/Kronrod error estimate stays above 1e-8 relative.
double sigma_general(const CellInvariants& inv);

/// Canonical angles of a tangent plane (the u' family).
std::pair<double, double> tangent_cell_angles(const TangentPlane& tangent);

/// Canonical angles of a normal plane (the v family).
std::pair<double, double> normal_cell_angles(const TangentPlane& normal);

/// (sin^2 theta, cos^2 theta) where 2 theta - pi/2 is the J'-Kahler angle of
/// the normal plane; with s = sin(beta') this is ((1 + s)/2, (1 - s)/2).
/// Throws NotLagrangianNormal unless the complement is J-Lagrangian within
/// 1e-6.
EllipseSemiaxes semiaxes_from_normal_plane(const TangentPlane& normal);

/// 4 * ellipse_perimeter(a, b); ranges over [4 pi, 16] for semiaxes with
/// a + b = 1.
double sigma_lagrangian_product(const EllipseSemiaxes& axes);

}  // namespace kin
