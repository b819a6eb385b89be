#pragma once

// Hamiltonian vector fields and flows on (S^2 x S^2, omega_0 + omega_0).
//
// Sign convention: i_{X_H} omega = dH, realized on each factor as
// X_H = (grad_p H x p, grad_q H x q).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kin/geometry_core.hpp"
#include "kin/surfaces.hpp"

namespace kin {

using Ambient6 = std::array<double, 6>;

/// Ambient coordinates (x1, y1, z1, x2, y2, z2) of a product point.
Ambient6 ambient(const ProductPoint& x);

/// Monomial coefficient * prod x_i^{e_i} over the six ambient coordinates.
struct Monomial {
  double coefficient = 0.0;
  std::array<std::uint8_t, 6> exponents{};

  int degree() const;
};

/// Polynomial of total degree <= 3 in the ambient coordinates.
class HamiltonianFunction {
 public:
  static constexpr int kMaxDegree = 3;

  HamiltonianFunction() = default;
  /// Merges equal monomials and drops zero coefficients. Throws DegreeTooHigh
  /// for any surviving monomial of degree > 3.
  explicit HamiltonianFunction(std::vector<Monomial> terms);

  const std::vector<Monomial>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  double value(const Ambient6& x) const;
  double value(const ProductPoint& x) const { return value(ambient(x)); }
  /// Exact term-wise gradient in R^6.
  Ambient6 gradient(const Ambient6& x) const;

 private:
  std::vector<Monomial> terms_;
};

/// Variable names in ambient order.
inline constexpr std::array<const char*, 6> kAmbientNames = {"x1", "y1", "z1", "x2", "y2", "z2"};

TangentVector hamiltonian_vector_field(const HamiltonianFunction& h, const ProductPoint& x);

/// Classical RK4 with n steps of size dt = time / n and renormalization onto
/// both spheres after every stage.
struct FlowParams {
  double time = 0.0;
  int steps = 16;

  /// Throws InvalidArgument unless steps >= 16 and |dt| <= 0.05.
  void validate() const;
  double dt() const { return time / steps; }

  /// Smallest valid step count with |dt| <= max_dt (at least 16).
  static FlowParams with_max_step(double time, double max_dt);
};

/// Endpoint of the integral curve. StepSizeTooLarge when a single step moves
/// the point more than 0.5 in the ambient norm.
ProductPoint flow_point(const HamiltonianFunction& h, const ProductPoint& x, const FlowParams& params);

/// Flows every lattice node of the torus sampled at m x m (m >= 64).
MeshSurface deform_surface(const HamiltonianFunction& h, const ProductTorusSurface& s,
                           const FlowParams& params, std::size_t m);

/// |omega(d rho u, d rho v) - omega(u, v)| for the time-t map rho, with the
/// pushforwards taken by central differences of step `eps` along u and v.
double symplectic_pullback_error(const HamiltonianFunction& h, const FlowParams& params,
                                 const ProductPoint& x, const TangentVector& u,
                                 const TangentVector& v, double eps = 1e-5);

}  // namespace kin
