#include "kin/cli/report.hpp"

#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace kin::cli {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["lhs"] = r.lhs;
  if (r.rhs.size() == 1) {
    j["rhs"] = r.rhs[0];
  } else {
    j["rhs"] = r.rhs;
  }
  j["stderr"] = r.std_error;
  j["tolerance"] = r.tolerance;
  j["verdict"] = r.pass ? "pass" : "fail";
  j["runtime_ms"] = r.runtime_ms;
  j["seed"] = r.seed;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) config[k] = v;
  if (!r.derived.empty()) {
    nlohmann::ordered_json derived = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.derived) derived[k] = v;
    config["derived"] = std::move(derived);
  }
  j["config"] = std::move(config);
  return j.dump();
}

std::string csv_header() { return "name,lhs,rhs_lower,rhs_upper,stderr,tolerance,verdict,runtime_ms,seed"; }

std::string to_csv(const VerificationReport& r) {
  const std::string lo = r.rhs.empty() ? "" : fmt(r.rhs.front());
  const std::string hi = r.rhs.empty() ? "" : fmt(r.rhs.back());
  return csv_field(r.name) + "," + fmt(r.lhs) + "," + lo + "," + hi + "," + fmt(r.std_error) + "," +
         fmt(r.tolerance) + "," + (r.pass ? "pass" : "fail") + "," + fmt(r.runtime_ms) + "," +
         std::to_string(r.seed);
}

void write_reports(std::ostream& os, const std::vector<VerificationReport>& reports, OutputFormat format) {
  if (format == OutputFormat::Csv) os << csv_header() << '\n';
  for (const auto& r : reports) os << (format == OutputFormat::Json ? to_json(r) : to_csv(r)) << '\n';
}

}  // namespace kin::cli
