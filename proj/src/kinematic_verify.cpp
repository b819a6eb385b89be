#include "kin/kinematic_verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <exception>
#include <memory>
#include <thread>

#include "kin/sigma_kernel.hpp"

namespace kin {

namespace {

constexpr double kLagrangianTol = 1e-6;
constexpr double kQuadratureRel = 1e-6;
constexpr double kZ = 3.0;
constexpr double kInvariantQuantum = 1e-12;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Runs body(i) for i in [0, n) on `workers` threads, rethrowing the first
// exception (by index) after all threads finish.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct SampleOutcome {
  std::uint32_t count = 0;
  std::uint32_t retries = 0;
};

// Integrates f(jet) against the weighted area element over all charts.
template <class F>
double surface_integral(const Surface& s, std::size_t m, F&& f) {
  double total = 0.0;
  for (std::size_t c = 0; c < s.chart_count(); ++c) {
    const ChartDomain d = s.domain(c);
    const auto us = quadrature_nodes(d.u0, d.u1, d.periodic_u, m);
    const auto vs = quadrature_nodes(d.v0, d.v1, d.periodic_v, m);
    const double cell = (d.u1 - d.u0) / static_cast<double>(m) * ((d.v1 - d.v0) / static_cast<double>(m));
    double chart_sum = 0.0;
    for (double u : us) {
      double row = 0.0;
      for (double v : vs) {
        const double w = s.weight(c, u, v);
        if (w == 0.0) continue;
        const SurfaceJet jet = s.jet(c, u, v);
        row += w * area_element(jet) * f(jet);
      }
      chart_sum += row;
    }
    total += chart_sum * cell;
  }
  return total;
}

}  // namespace

MonteCarloEstimate mc_expected_count(const Surface& n, const ProductTorusSurface& l,
                                     std::size_t samples, std::uint64_t seed,
                                     const MonteCarloOptions& options) {
  if (samples == 0) throw InvalidArgument("need at least one sample");
  const auto* product = dynamic_cast<const ProductTorusSurface*>(&n);
  std::unique_ptr<ContourCounter> counter;
  if (!product) counter = std::make_unique<ContourCounter>(n, options.grid, options.check_refinement);

  auto count_once = [&](const GroupElement& g) -> std::uint32_t {
    if (product) {
      const IntersectionResult r = count_product_product(*product, g, l);
      if (r.min_transversality <= 1e-8) throw NonTransversalSample("tangential circle pair");
      return static_cast<std::uint32_t>(r.count);
    }
    return static_cast<std::uint32_t>(counter->count(g, l).count);
  };

  std::vector<SampleOutcome> outcomes(samples);
  parallel_for(samples, options.workers, [&](std::size_t i) {
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
      SplitMix64 rng = sample_stream(seed, i, static_cast<std::uint64_t>(attempt));
      const GroupElement g = sample_group_element(rng);
      try {
        outcomes[i] = {count_once(g), static_cast<std::uint32_t>(attempt)};
        return;
      } catch (const NonTransversalSample&) {
      } catch (const CoaxialCircles&) {
      } catch (const GridUnstable&) {
      }
    }
    throw ExcessiveDiscards("sample " + std::to_string(i) + " stayed non-generic after " +
                            std::to_string(options.max_attempts) + " attempts");
  });

  std::uint64_t sum = 0, sum_sq = 0, discards = 0;
  for (const auto& o : outcomes) {
    sum += o.count;
    sum_sq += static_cast<std::uint64_t>(o.count) * o.count;
    discards += o.retries;
  }
  if (static_cast<double>(discards) > options.max_discard_fraction * static_cast<double>(samples)) {
    throw ExcessiveDiscards(std::to_string(discards) + " discarded draws for " +
                            std::to_string(samples) + " samples");
  }
  MonteCarloEstimate est;
  est.sample_count = samples;
  est.discard_count = static_cast<std::size_t>(discards);
  const long double nn = static_cast<long double>(samples);
  const long double mean = static_cast<long double>(sum) / nn;
  long double var = 0.0L;
  if (samples > 1) {
    var = (static_cast<long double>(sum_sq) - static_cast<long double>(sum) * mean) / (nn - 1.0L);
    var = std::max(var, 0.0L);
  }
  est.mean = static_cast<double>(mean);
  est.stderr_mean = static_cast<double>(std::sqrt(var / nn));
  est.integral = est.mean * MeasureConstants::vol_g;
  est.integral_stderr = est.stderr_mean * MeasureConstants::vol_g;
  return est;
}

double rhs_lagrangian(const Surface& n, const ProductTorusSurface& l, std::size_t m) {
  if (lagrangian_defect(n) >= kLagrangianTol) throw NotLagrangian("surface is not Lagrangian");
  const double perimeter_integral = surface_integral(n, m, [](const SurfaceJet& jet) {
    const TangentPlane tangent = TangentPlane::from_spanning(jet.point, jet.du, jet.dv);
    const EllipseSemiaxes ax = semiaxes_from_normal_plane(normal_plane(tangent));
    return ellipse_perimeter(ax.a, ax.b);
  });
  return 4.0 * volume(l, 64) * perimeter_integral;
}

double rhs_lagrangian_converged(const Surface& n, const ProductTorusSurface& l, std::size_t m) {
  const double coarse = rhs_lagrangian(n, l, m);
  const double fine = rhs_lagrangian(n, l, 2 * m);
  if (std::abs(fine - coarse) > kQuadratureRel * std::abs(fine)) {
    throw QuadratureNotConverged("surface quadrature changed by more than 1e-6 under refinement");
  }
  return fine;
}

double rhs_general(const Surface& n, const Surface& l, std::size_t mn, std::size_t ml) {
  using Key = std::array<long long, 2>;
  auto key = [](std::pair<double, double> a) {
    return Key{std::llround(a.first / kInvariantQuantum), std::llround(a.second / kInvariantQuantum)};
  };
  auto weighted = [&](const Surface& s, std::size_t m, bool tangent_side) {
    std::map<Key, double> buckets;
    for (std::size_t c = 0; c < s.chart_count(); ++c) {
      const ChartDomain d = s.domain(c);
      const auto us = quadrature_nodes(d.u0, d.u1, d.periodic_u, m);
      const auto vs = quadrature_nodes(d.v0, d.v1, d.periodic_v, m);
      const double cell =
          (d.u1 - d.u0) / static_cast<double>(m) * ((d.v1 - d.v0) / static_cast<double>(m));
      for (double u : us) {
        for (double v : vs) {
          const double w = s.weight(c, u, v);
          if (w == 0.0) continue;
          const SurfaceJet jet = s.jet(c, u, v);
          const TangentPlane tangent = TangentPlane::from_spanning(jet.point, jet.du, jet.dv);
          const auto angles =
              tangent_side ? tangent_cell_angles(tangent) : normal_cell_angles(normal_plane(tangent));
          buckets[key(angles)] += w * area_element(jet) * cell;
        }
      }
    }
    return buckets;
  };
  const auto bn = weighted(n, mn, true);
  const auto bl = weighted(l, ml, false);
  double total = 0.0;
  for (const auto& [kn, wn] : bn) {
    for (const auto& [kl, wl] : bl) {
      const CellInvariants inv{static_cast<double>(kn[0]) * kInvariantQuantum,
                               static_cast<double>(kn[1]) * kInvariantQuantum,
                               static_cast<double>(kl[0]) * kInvariantQuantum,
                               static_cast<double>(kl[1]) * kInvariantQuantum};
      total += wn * wl * sigma_general(inv);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------

VerificationReport verify_poincare(const Surface& n, const ProductTorusSurface& l, std::size_t samples,
                                   std::uint64_t seed, double rel_tol, const MonteCarloOptions& options) {
  const auto start = Clock::now();
  const MonteCarloEstimate est = mc_expected_count(n, l, samples, seed, options);
  const bool lagrangian = lagrangian_defect(n) < kLagrangianTol;
  const double rhs = lagrangian ? rhs_lagrangian_converged(n, l) : rhs_general(n, l);
  VerificationReport r;
  r.name = "poincare";
  r.lhs = est.integral;
  r.rhs = {rhs};
  r.std_error = est.integral_stderr;
  r.tolerance = kZ * est.integral_stderr + rel_tol * std::abs(rhs);
  r.pass = std::abs(r.lhs - rhs) <= r.tolerance;
  r.seed = seed;
  r.config = {{"samples", std::to_string(samples)},
              {"rel_tol", fmt(rel_tol)},
              {"rhs_method", lagrangian ? "ellipse-perimeter" : "general-kernel"}};
  r.derived = {{"mean", est.mean},
               {"mean_stderr", est.stderr_mean},
               {"discards", static_cast<double>(est.discard_count)}};
  r.runtime_ms = elapsed_ms(start);
  return r;
}

VerificationReport verify_bounds(const Surface& n, const ProductTorusSurface& l, std::size_t samples,
                                 std::uint64_t seed, const MonteCarloOptions& options) {
  const auto start = Clock::now();
  const MonteCarloEstimate est = mc_expected_count(n, l, samples, seed, options);
  const double vn = volume(n);
  const double vl = volume(l, 64);
  const double lower = 4.0 * kPi * vn * vl;
  const double upper = 16.0 * vn * vl;
  VerificationReport r;
  r.name = "bounds";
  r.lhs = est.integral;
  r.rhs = {lower, upper};
  r.std_error = est.integral_stderr;
  r.tolerance = kZ * est.integral_stderr + kQuadratureRel * upper;
  r.pass = r.lhs >= lower - r.tolerance && r.lhs <= upper + r.tolerance;
  r.seed = seed;
  r.config = {{"samples", std::to_string(samples)}};
  r.derived = {{"volume_n", vn}, {"volume_l", vl}, {"mean", est.mean}};
  if (lagrangian_defect(n) < kLagrangianTol) {
    const double q = rhs_lagrangian_converged(n, l);
    r.derived["quadrature"] = q;
    r.derived["upper_gap"] = (upper - q) / upper;
    r.derived["lower_gap"] = (q - lower) / lower;
  }
  r.runtime_ms = elapsed_ms(start);
  return r;
}

std::vector<VerificationReport> ChainResult::reports(std::uint64_t seed) const {
  const double tol = slack();
  VerificationReport chain;
  chain.name = "chain";
  chain.lhs = b;
  chain.rhs = {c, a};
  chain.std_error = b_stderr;
  chain.tolerance = tol;
  chain.pass = upper_holds() && lower_holds();
  chain.seed = seed;
  chain.runtime_ms = runtime_ms;
  chain.derived = {{"A", a}, {"B", b}, {"C", c}, {"mean", estimate.mean},
                   {"discards", static_cast<double>(estimate.discard_count)}};

  VerificationReport vol;
  vol.name = "deformed-volume";
  vol.lhs = deformed_volume;
  vol.rhs = {4.0 * kPi * kPi};
  vol.tolerance = 1e-3;
  vol.pass = deformed_volume >= 4.0 * kPi * kPi - vol.tolerance;
  vol.seed = seed;
  vol.runtime_ms = runtime_ms;

  VerificationReport lag;
  lag.name = "lagrangian-defect";
  lag.lhs = lagrangian_defect;
  lag.rhs = {0.0};
  lag.tolerance = kLagrangianTol;
  lag.pass = lagrangian_defect < kLagrangianTol;
  lag.seed = seed;
  lag.runtime_ms = runtime_ms;
  VerificationReport pull;
  pull.name = "symplectic-pullback";
  pull.lhs = pullback_error;
  pull.rhs = {0.0};
  pull.tolerance = 1e-6;
  pull.pass = pullback_error < pull.tolerance;
  pull.seed = seed;
  pull.runtime_ms = runtime_ms;
  return {chain, vol, lag, pull};
}

ChainResult verify_main_chain(const HamiltonianFunction& h, double time, std::size_t samples,
                              std::uint64_t seed, const ChainOptions& options) {
  const auto start = Clock::now();
  const ProductTorusSurface torus = ProductTorusSurface::great_torus();
  const FlowParams params = FlowParams::with_max_step(time, options.max_dt);
  const MeshSurface deformed = deform_surface(h, torus, params, options.mesh);
  ChainResult r;
  r.deformed_volume = volume(deformed);
  r.lagrangian_defect = lagrangian_defect(deformed);
  for (int k = 0; k < 8; ++k) {
    const ProductPoint x = torus.evaluate(0.7 * k + 0.1, 1.3 * k + 0.2);
    const auto frame = tangent_frame(x);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) {
        r.pullback_error =
            std::max(r.pullback_error, symplectic_pullback_error(h, params, x, frame[i], frame[j]));
      }
    }
  }
  r.estimate = mc_expected_count(deformed, torus, samples, seed, options.mc);
  const double vl = 4.0 * kPi * kPi;
  r.a = 16.0 * r.deformed_volume * vl;
  r.b = r.estimate.integral;
  r.b_stderr = r.estimate.integral_stderr;
  r.c = 4.0 * MeasureConstants::vol_g;
  r.runtime_ms = elapsed_ms(start);
  return r;
}

}  // namespace kin
