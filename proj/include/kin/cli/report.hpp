#pragma once

// Serialization of verification reports: one JSON object per line, or CSV.

#include <iosfwd>
#include <string>
#include <vector>

#include "kin/kinematic_verify.hpp"

namespace kin::cli {

enum class OutputFormat { Json, Csv };

/// Single-line JSON object with keys name, lhs, rhs, stderr, tolerance,
/// verdict, runtime_ms, seed, config (in that order). `rhs` is a number for
/// identities and a [lower, upper] pair for bounds. Derived quantities appear
/// under config.derived.
std::string to_json(const VerificationReport& r);

std::string csv_header();
std::string to_csv(const VerificationReport& r);

void write_reports(std::ostream& os, const std::vector<VerificationReport>& reports, OutputFormat format);

}  // namespace kin::cli
