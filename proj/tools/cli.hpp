#pragma once

#include <iosfwd>

namespace attctl::cli {

/// Exit codes of the attctl front end.
enum ExitCode : int {
  kSuccess = 0,
  kRuntimeFailure = 1,  ///< e.g. NonFiniteState, unwritable output
  kUsageError = 2,      ///< bad flags, unreadable or invalid scenario file
};

/// Runs one attctl command. CSV goes to --out when given, otherwise to `out`;
/// summaries and diagnostics go to `err` (or `out` when CSV went to a file).
/// Nothing is written to --out unless the command succeeds.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace attctl::cli
