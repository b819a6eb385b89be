#include "kin/cli/run_command.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kin/cli/hamiltonian_expr.hpp"
#include "kin/cli/report.hpp"
#include "kin/cli/surface_spec.hpp"
#include "kin/kinematic_verify.hpp"
#include "kin/sigma_kernel.hpp"

namespace kin::cli {

namespace {

std::string fmt15(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

struct Options {
  std::optional<std::uint64_t> seed;
  std::size_t samples = 10000;
  std::size_t grid = 128;
  unsigned workers = 1;
  bool no_timing = false;
  std::string output;
  std::string format = "json";
  std::optional<double> rel_tol;

  std::string surface = "great-torus";
  std::string against = "great-torus";
  std::string surface_arg;
  std::string n_spec;
  std::string l_spec;
  std::string hamiltonian;
  double time = 0.5;
  std::string emit_mesh;
  std::size_t mesh = 128;
  std::size_t theta_steps = 32;
  double a = 0.0;
  double b = 0.0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const Options& o, std::ostream& err) {
  std::uint64_t seed = 0;
  if (o.seed) {
    seed = *o.seed;
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  err << "seed: " << seed << '\n';
  return seed;
}

void check_samples(const Options& o) {
  if (o.samples < 1000) throw UsageError("--samples must be at least 1000");
}

MonteCarloOptions mc_options(const Options& o) {
  MonteCarloOptions mc;
  mc.grid = std::max<std::size_t>(o.grid, 128);
  mc.workers = std::max(1u, o.workers);
  return mc;
}

OutputFormat format_of(const Options& o) {
  return o.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
}

int emit(const Options& o, std::ostream& out, std::vector<VerificationReport> reports) {
  bool ok = true;
  for (auto& r : reports) {
    if (o.no_timing) r.runtime_ms = 0.0;
    ok = ok && r.pass;
  }
  write_reports(out, reports, format_of(o));
  return ok ? kExitPass : kExitFailure;
}

VerificationReport moment_report(const std::string& name, const MomentEstimate& m, double expected,
                                 std::uint64_t seed, std::size_t samples) {
  VerificationReport r;
  r.name = name;
  r.lhs = m.mean;
  r.rhs = {expected};
  r.std_error = m.stderr_mean;
  r.tolerance = 3.0 * m.stderr_mean;
  r.pass = std::abs(m.mean - expected) <= r.tolerance;
  r.seed = seed;
  r.config = {{"samples", std::to_string(samples)}};
  return r;
}

int cmd_haar_stats(const Options& o, std::ostream& out, std::ostream& err) {
  check_samples(o);
  const std::uint64_t seed = resolve_seed(o, err);
  const auto start = std::chrono::steady_clock::now();
  const HaarMoments m = haar_moments(o.samples, seed);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::vector<VerificationReport> reports = {
      moment_report("haar-r11-squared", m.r11_squared, 1.0 / 3.0, seed, o.samples),
      moment_report("haar-trace", m.trace, 0.0, seed, o.samples),
      moment_report("haar-trace-squared", m.trace_squared, 1.0, seed, o.samples)};
  for (auto& r : reports) r.runtime_ms = ms;
  return emit(o, out, std::move(reports));
}

int cmd_volume(const Options& o, std::ostream& out) {
  const auto s = SurfaceSpec::parse(o.surface_arg).build();
  out << fmt15(volume(*s)) << '\n';
  return kExitPass;
}

int cmd_sigma_table(const Options& o, std::ostream& out) {
  if (o.theta_steps < 1) throw UsageError("--theta-steps must be positive");
  out << "theta,sigma_general,four_perimeter,relative_difference\n";
  for (std::size_t k = 0; k <= o.theta_steps; ++k) {
    const double theta = 0.5 * kPi * static_cast<double>(k) / static_cast<double>(o.theta_steps);
    const double s = std::sin(theta), c = std::cos(theta);
    const double general = sigma_general({theta, theta - 0.5 * kPi, 0.5 * kPi, 0.0});
    const double closed = sigma_lagrangian_product({s * s, c * c});
    char line[160];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.3e\n", theta, general, closed,
                  std::abs(general - closed) / closed);
    out << line;
  }
  return kExitPass;
}

int cmd_ellipse(const Options& o, std::ostream& out) {
  out << fmt15(ellipse_perimeter(o.a, o.b)) << '\n';
  return kExitPass;
}

int cmd_count(const Options& o, std::ostream& out, std::ostream& err) {
  const auto n = SurfaceSpec::parse(o.n_spec).build();
  const ProductTorusSurface l = SurfaceSpec::parse(o.l_spec).build_product();
  const std::uint64_t seed = resolve_seed(o, err);
  SplitMix64 rng = sample_stream(seed, 0);
  const GroupElement g = sample_group_element(rng);
  IntersectionResult r;
  if (const auto* p = dynamic_cast<const ProductTorusSurface*>(n.get())) {
    r = count_product_product(*p, g, l);
  } else {
    r = count_surface_product(*n, g, l, std::max<std::size_t>(o.grid, 128));
  }
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["count"] = r.count;
  j["min_transversality"] = r.min_transversality;
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const auto& x : r.points) {
    const Vec3& p = x.first.vec();
    const Vec3& q = x.second.vec();
    pts.push_back({p.x, p.y, p.z, q.x, q.y, q.z});
  }
  j["points"] = std::move(pts);
  out << j.dump() << '\n';
  return kExitPass;
}

int cmd_verify_poincare(const Options& o, std::ostream& out, std::ostream& err) {
  check_samples(o);
  const SurfaceSpec ns = SurfaceSpec::parse(o.surface);
  const auto n = ns.build();
  const ProductTorusSurface l = SurfaceSpec::parse(o.against).build_product();
  const std::uint64_t seed = resolve_seed(o, err);
  const double rel = o.rel_tol.value_or(ns.kind == SurfaceSpec::Kind::Mesh ? 1e-3 : 1e-6);
  VerificationReport r = verify_poincare(*n, l, o.samples, seed, rel, mc_options(o));
  r.config["surface"] = ns.to_string();
  r.config["against"] = SurfaceSpec::parse(o.against).to_string();
  return emit(o, out, {r});
}

int cmd_verify_bounds(const Options& o, std::ostream& out, std::ostream& err) {
  check_samples(o);
  const SurfaceSpec ns = SurfaceSpec::parse(o.surface);
  const auto n = ns.build();
  const ProductTorusSurface l = SurfaceSpec::parse(o.against).build_product();
  const std::uint64_t seed = resolve_seed(o, err);
  VerificationReport r = verify_bounds(*n, l, o.samples, seed, mc_options(o));
  r.config["surface"] = ns.to_string();
  r.config["against"] = SurfaceSpec::parse(o.against).to_string();
  return emit(o, out, {r});
}

int cmd_verify_chain(const Options& o, std::ostream& out, std::ostream& err) {
  check_samples(o);
  const HamiltonianExpr expr = HamiltonianExpr::parse(o.hamiltonian);
  const HamiltonianFunction h = expr.expand();
  const std::uint64_t seed = resolve_seed(o, err);
  ChainOptions opts;
  opts.mesh = o.mesh;
  opts.mc = mc_options(o);
  const ChainResult chain = verify_main_chain(h, o.time, o.samples, seed, opts);
  auto reports = chain.reports(seed);
  for (auto& r : reports) {
    r.config["hamiltonian"] = expr.to_string();
    r.config["time"] = fmt15(o.time);
    r.config["samples"] = std::to_string(o.samples);
    r.config["mesh"] = std::to_string(o.mesh);
  }
  return emit(o, out, std::move(reports));
}

int cmd_flow(const Options& o, std::ostream& out) {
  const HamiltonianExpr expr = HamiltonianExpr::parse(o.hamiltonian);
  const HamiltonianFunction h = expr.expand();
  const FlowParams params = FlowParams::with_max_step(o.time, 0.01);
  const MeshSurface mesh = deform_surface(h, ProductTorusSurface::great_torus(), params, o.mesh);
  if (!o.emit_mesh.empty()) {
    std::ofstream f(o.emit_mesh);
    if (!f) throw UsageError("cannot write mesh file '" + o.emit_mesh + "'");
    mesh.write(f);
  }
  nlohmann::ordered_json j;
  j["hamiltonian"] = expr.to_string();
  j["time"] = o.time;
  j["steps"] = params.steps;
  j["mesh"] = o.mesh;
  j["volume"] = volume(mesh);
  j["lagrangian_defect"] = lagrangian_defect(mesh);
  out << j.dump() << '\n';
  return kExitPass;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Monte Carlo and quadrature checks of integral-geometric formulas on S^2 x S^2",
               "kinverify"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "Random seed (printed to stderr; random if omitted)");
  app.add_option("--samples", o.samples, "Monte Carlo sample count (>= 1000)");
  app.add_option("--grid", o.grid, "Contour grid for non-product surfaces (>= 64; raised to 128)")
      ->check(CLI::Range(std::size_t{64}, std::size_t{1} << 16));
  app.add_option("--workers", o.workers, "Sampling threads (output does not depend on this)");
  app.add_flag("--no-timing", o.no_timing, "Report runtime_ms as 0 for byte-stable output");
  app.add_option("--output", o.output, "Write results to this file instead of stdout");
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--rel-tol", o.rel_tol, "Relative tolerance for verify-poincare");

  auto* haar = app.add_subcommand("haar-stats", "Moments of the Haar rotation sampler");
  auto* vol = app.add_subcommand("volume", "Area of a surface");
  vol->add_option("surface", o.surface_arg, "Surface spec")->required();
  auto* table = app.add_subcommand("sigma-table", "CSV sweep of the kernel identity over theta");
  table->add_option("--theta-steps", o.theta_steps, "Number of theta intervals on [0, pi/2]");
  auto* ell = app.add_subcommand("ellipse", "Perimeter of an ellipse");
  ell->add_option("a", o.a, "First semiaxis")->required();
  ell->add_option("b", o.b, "Second semiaxis")->required();
  auto* count = app.add_subcommand("count", "Intersection points of N and g L for one random g");
  count->add_option("n", o.n_spec, "Surface spec of N")->required();
  count->add_option("l", o.l_spec, "Product torus spec of L")->required();
  auto* poincare = app.add_subcommand("verify-poincare", "Monte Carlo integral vs quadrature");
  poincare->add_option("--surface", o.surface, "Surface spec of N");
  poincare->add_option("--against", o.against, "Product torus spec of L");
  auto* bounds = app.add_subcommand("verify-bounds", "Two-sided bounds on the integral");
  bounds->add_option("--surface", o.surface, "Surface spec of N");
  bounds->add_option("--against", o.against, "Product torus spec of L");
  auto* chain = app.add_subcommand("verify-chain", "Volume chain for a Hamiltonian deformation");
  chain->add_option("--hamiltonian", o.hamiltonian, "Polynomial in x1 y1 z1 x2 y2 z2")->required();
  chain->add_option("--time", o.time, "Flow time");
  chain->add_option("--mesh", o.mesh, "Mesh resolution of the deformed torus (>= 64)");
  auto* flow = app.add_subcommand("flow", "Flow the great torus and summarize the image");
  flow->add_option("--hamiltonian", o.hamiltonian, "Polynomial in x1 y1 z1 x2 y2 z2")->required();
  flow->add_option("--time", o.time, "Flow time");
  flow->add_option("--emit-mesh", o.emit_mesh, "Write the deformed mesh to this path");
  flow->add_option("--mesh", o.mesh, "Mesh resolution (>= 64)");

  std::vector<const char*> argv{"kinverify"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "kinverify: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ofstream file;
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) {
      err << "kinverify: cannot open output file '" << o.output << "'\n";
      return kExitUsage;
    }
  }
  std::ostream& sink = o.output.empty() ? out : file;

  try {
    if (haar->parsed()) return cmd_haar_stats(o, sink, err);
    if (vol->parsed()) return cmd_volume(o, sink);
    if (table->parsed()) return cmd_sigma_table(o, sink);
    if (ell->parsed()) return cmd_ellipse(o, sink);
    if (count->parsed()) return cmd_count(o, sink, err);
    if (poincare->parsed()) return cmd_verify_poincare(o, sink, err);
    if (bounds->parsed()) return cmd_verify_bounds(o, sink, err);
    if (chain->parsed()) return cmd_verify_chain(o, sink, err);
    if (flow->parsed()) return cmd_flow(o, sink);
  } catch (const UsageError& e) {
    err << "kinverify: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SyntaxError& e) {
    err << "kinverify: syntax error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnknownVariable& e) {
    err << "kinverify: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegreeTooHigh& e) {
    err << "kinverify: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "kinverify: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NegativeAxis& e) {
    err << "kinverify: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MeshFormatError& e) {
    err << "kinverify: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "kinverify: " << e.what() << '\n';
    return kExitFailure;
  }
  err << "kinverify: no subcommand given\n";
  return kExitUsage;
}

}  // namespace kin::cli
