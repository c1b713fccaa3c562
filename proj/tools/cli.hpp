#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace starspec::cli {

enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kUsageError = 2 };

/// Runs one star-spectra invocation.  `args` excludes the program name.
/// Results go to `out`, diagnostics and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "lo:hi:step" (inclusive) or a comma-separated list of reals.
std::vector<double> parse_grid(const std::string& text);

}  // namespace starspec::cli
