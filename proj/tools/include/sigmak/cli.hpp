#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sigmak::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalFailure = 2 };

/// Parses a grid: "v", "v1,v2,...", "lo:hi:N" (linear) or "lo:hi:Nlog" (log-spaced).
/// An empty string or N = 0 gives an empty grid. Throws std::invalid_argument.
std::vector<double> parse_grid(const std::string& text);

/// Runs the tool on argv-style arguments (without the program name).
/// Data goes to --out when given, otherwise to `out`; the summary goes to `out`
/// in the first case and to `err` in the second.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sigmak::cli
