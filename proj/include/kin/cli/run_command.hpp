#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kin::cli {

/// Exit statuses of run_command.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `kinverify` invocation. `args` excludes the program name.
/// Results go to `out` (or the --output file), diagnostics and the seed in
/// use to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kin::cli
