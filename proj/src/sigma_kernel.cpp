#include "kin/sigma_kernel.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace kin {

namespace {

constexpr double kDegenerateAxis = 1e-8;
constexpr double kLagrangianTol = 1e-6;
constexpr unsigned kMaxDepth = 30;
constexpr double kTargetRel = 1e-12;
constexpr double kAcceptRel = 1e-8;

// int_0^{2 pi} |alpha + rho cos t| dt for rho >= 0.
double abs_cosine_average(double alpha, double rho) {
  if (rho <= std::abs(alpha)) return kTwoPi * std::abs(alpha);
  const double t0 = std::acos(std::clamp(-alpha / rho, -1.0, 1.0));
  return 4.0 * alpha * t0 + 4.0 * rho * std::sin(t0) - kTwoPi * alpha;
}

Vec4 rotate12(const Vec4& x, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {c * x[0] + s * x[1], -s * x[0] + c * x[1], x[2], x[3]};
}

Vec4 rotate34(const Vec4& x, double psi) {
  const double c = std::cos(psi), s = std::sin(psi);
  return {x[0], x[1], c * x[2] + s * x[3], -s * x[2] + c * x[3]};
}

class KernelIntegrand {
 public:
  explicit KernelIntegrand(const CellInvariants& inv)
      : u1_{std::sin(inv.theta1), 0.0, std::cos(inv.theta1), 0.0},
        u2_{0.0, std::sin(inv.theta2), 0.0, std::cos(inv.theta2)} {
    const Vec4 v1{std::cos(inv.tau1), 0.0, -std::sin(inv.tau1), 0.0};
    const Vec4 v2{0.0, std::cos(inv.tau2), 0.0, -std::sin(inv.tau2)};
    // b(v1 ^ v2) = c + cos(psi) P + sin(psi) Q exactly, since b fixes e12, e34
    // and rotates the mixed components once.
    eta0_ = wedge(rotate34(v1, 0.0), rotate34(v2, 0.0));
    eta90_ = wedge(rotate34(v1, 0.5 * kPi), rotate34(v2, 0.5 * kPi));
    eta180_ = wedge(rotate34(v1, kPi), rotate34(v2, kPi));
  }

  // psi-integral at fixed phi, in closed form.
  double operator()(double phi) const {
    const Bivector xi = wedge(rotate12(u1_, phi), rotate12(u2_, phi));
    const double f0 = inner(xi, eta0_);
    const double f90 = inner(xi, eta90_);
    const double f180 = inner(xi, eta180_);
    const double alpha = 0.5 * (f0 + f180);
    const double beta = 0.5 * (f0 - f180);
    const double gamma = f90 - alpha;
    return abs_cosine_average(alpha, std::hypot(beta, gamma));
  }

 private:
  Vec4 u1_;
  Vec4 u2_;
  Bivector eta0_;
  Bivector eta90_;
  Bivector eta180_;
};

}  // namespace

bool CellInvariants::in_fundamental_cell(double tol) const {
  auto in = [tol](double x) { return x >= -tol && x <= kPi + tol; };
  return in(theta1 + theta2) && in(theta1 - theta2) && in(tau1 + tau2) && in(tau1 - tau2);
}

double ellipse_perimeter(double a, double b) {
  if (a < 0.0 || b < 0.0 || std::isnan(a) || std::isnan(b)) {
    throw NegativeAxis("ellipse semiaxes must be nonnegative");
  }
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (lo < kDegenerateAxis) return 4.0 * hi;
  // P = 2 pi / M(a, b) * (a^2 - sum_{n>=0} 2^{n-1} c_n^2)
  double an = hi, bn = lo;
  double weight = 0.5;
  double sum = weight * (hi - lo) * (hi + lo);
  for (int it = 0; it < 64; ++it) {
    const double cn = 0.5 * (an - bn);
    const double next_a = 0.5 * (an + bn);
    bn = std::sqrt(an * bn);
    an = next_a;
    weight *= 2.0;
    sum += weight * cn * cn;
    if (cn <= 1e-17 * an) break;
  }
  return kTwoPi / an * (hi * hi - sum);
}

double ellipse_perimeter_quadrature(double a, double b) {
  if (a < 0.0 || b < 0.0 || std::isnan(a) || std::isnan(b)) {
    throw NegativeAxis("ellipse semiaxes must be nonnegative");
  }
  auto f = [a, b](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return std::sqrt(a * a * c * c + b * b * s * s);
  };
  using boost::math::quadrature::gauss_kronrod;
  return 4.0 * gauss_kronrod<double, 61>::integrate(f, 0.0, 0.5 * kPi, 12, 1e-13);
}

double sigma_general(const CellInvariants& inv) {
  const KernelIntegrand g(inv);
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  const double value = gauss_kronrod<double, 31>::integrate(g, 0.0, kTwoPi, kMaxDepth, kTargetRel, &error);
  if (!(error <= kAcceptRel * std::max(std::abs(value), 1e-300))) {
    throw QuadratureNotConverged("sigma kernel quadrature did not converge");
  }
  return value;
}

std::pair<double, double> tangent_cell_angles(const TangentPlane& tangent) {
  const double diff = std::acos(std::clamp(kahler_cosine(tangent, ComplexStructure::J), -1.0, 1.0));
  const double sum =
      std::acos(std::clamp(-kahler_cosine(tangent, ComplexStructure::JPrime), -1.0, 1.0));
  return {0.5 * (sum + diff), 0.5 * (sum - diff)};
}

std::pair<double, double> normal_cell_angles(const TangentPlane& normal) {
  const double diff = std::acos(std::clamp(kahler_cosine(normal, ComplexStructure::J), -1.0, 1.0));
  const double sum =
      std::acos(std::clamp(kahler_cosine(normal, ComplexStructure::JPrime), -1.0, 1.0));
  return {0.5 * (sum + diff), 0.5 * (sum - diff)};
}

EllipseSemiaxes semiaxes_from_normal_plane(const TangentPlane& normal) {
  const TangentPlane tangent = normal_plane(normal);
  if (std::abs(kahler_cosine(tangent, ComplexStructure::J)) > std::sin(kLagrangianTol)) {
    throw NotLagrangianNormal("complement of the plane is not Lagrangian for J");
  }
  const double c = kahler_cosine(normal, ComplexStructure::JPrime);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  return {0.5 * (1.0 + s), 0.5 * (1.0 - s)};
}

double sigma_lagrangian_product(const EllipseSemiaxes& axes) {
  return 4.0 * ellipse_perimeter(axes.a, axes.b);
}

}  // namespace kin
