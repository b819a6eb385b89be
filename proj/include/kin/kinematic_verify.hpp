#pragma once

// Monte Carlo estimation of the G-averaged intersection count, the
// quadrature right-hand sides it is compared against, and verification
// reports that bundle the comparisons.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kin/hamiltonian_flow.hpp"
#include "kin/intersection_counter.hpp"
#include "kin/surfaces.hpp"

namespace kin {

struct MonteCarloEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::size_t sample_count = 0;
  std::size_t discard_count = 0;
  /// mean * vol(G) and its standard error.
  double integral = 0.0;
  double integral_stderr = 0.0;
};

struct MonteCarloOptions {
  /// Contour grid for non-product N.
  std::size_t grid = 128;
  bool check_refinement = true;
  /// Threads used for sampling. Results do not depend on this value.
  unsigned workers = 1;
  /// Retries of a discarded sample before it counts as lost.
  int max_attempts = 32;
  /// Allowed fraction of samples that needed a retry.
  double max_discard_fraction = 0.01;
};

/// Averages #(N cap g L) over Haar-random g. Sample i uses the stream
/// (seed, i, attempt); non-generic samples (tangency, coaxial circles,
/// unstable grids) are redrawn with the next attempt and counted as
/// discards. Throws ExcessiveDiscards above the allowed fraction.
///
/// Product tori N use the closed-form circle count; anything else goes
/// through a ContourCounter built once for the whole run.
MonteCarloEstimate mc_expected_count(const Surface& n, const ProductTorusSurface& l,
                                     std::size_t samples, std::uint64_t seed,
                                     const MonteCarloOptions& options = {});

/// 4 vol(L) int_N perimeter(sin^2 theta, cos^2 theta) dA for a Lagrangian N
/// and a product torus L, by composite quadrature with m points per axis.
/// Throws NotLagrangian when N's defect is 1e-6 or more.
double rhs_lagrangian(const Surface& n, const ProductTorusSurface& l, std::size_t m = 256);

/// As above at m and 2m; QuadratureNotConverged unless they agree to 1e-6
/// relative. Returns the finer value.
double rhs_lagrangian_converged(const Surface& n, const ProductTorusSurface& l, std::size_t m = 256);

/// int_N int_L sigma(T_x N, T_y^perp L) dx dy with the general kernel, for
/// any N and L. The kernel is cached on invariants rounded to 1e-12.
double rhs_general(const Surface& n, const Surface& l, std::size_t mn = 64, std::size_t ml = 64);

/// Outcome of one comparison. `rhs` holds one value for an identity and two
/// (lower, upper) for a bound.
struct VerificationReport {
  std::string name;
  double lhs = 0.0;
  std::vector<double> rhs;
  double std_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
  /// Auxiliary numbers computed along the way.
  std::map<std::string, double> derived;
};

/// Monte Carlo integral vs the quadrature right-hand side (ellipse
/// perimeters for Lagrangian N, the general kernel otherwise); passes when
/// |lhs - rhs| <= 3 stderr + rel_tol * rhs.
VerificationReport verify_poincare(const Surface& n, const ProductTorusSurface& l, std::size_t samples,
                                   std::uint64_t seed, double rel_tol,
                                   const MonteCarloOptions& options = {});

/// 4 pi vol(N) vol(L) <= integral <= 16 vol(N) vol(L), each side allowed a
/// 3 stderr slack. For a Lagrangian N the quadrature value and its relative
/// distance to either bound are recorded in `derived`.
VerificationReport verify_bounds(const Surface& n, const ProductTorusSurface& l, std::size_t samples,
                                 std::uint64_t seed, const MonteCarloOptions& options = {});

/// A = 16 vol(rho T) 4 pi^2, B = integral of #(rho T cap g T), C = 256 pi^4
/// for the great torus T and the time-t map rho of H. A comes from mesh
/// quadrature, so both inequalities allow 3 stderr plus 1e-6 C.
struct ChainResult {
  double a = 0.0;
  double b = 0.0;
  double b_stderr = 0.0;
  double c = 0.0;
  double deformed_volume = 0.0;
  double lagrangian_defect = 0.0;
  /// Largest |omega(d rho u, d rho v) - omega(u, v)| over frame pairs at a
  /// fixed set of torus points.
  double pullback_error = 0.0;
  MonteCarloEstimate estimate;
  double runtime_ms = 0.0;

  double slack() const { return 3.0 * b_stderr + 1e-6 * c; }
  bool upper_holds() const { return a >= b - slack(); }
  bool lower_holds() const { return b >= c - slack(); }

  /// "chain", "deformed-volume", "lagrangian-defect" and
  /// "symplectic-pullback" reports.
  std::vector<VerificationReport> reports(std::uint64_t seed) const;
};

struct ChainOptions {
  std::size_t mesh = 128;
  /// Largest flow step.
  double max_dt = 0.01;
  MonteCarloOptions mc;
};

ChainResult verify_main_chain(const HamiltonianFunction& h, double time, std::size_t samples,
                              std::uint64_t seed, const ChainOptions& options = {});

}  // namespace kin
