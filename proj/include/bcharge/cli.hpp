#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bcharge {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitSelftestFailed = 1,
  kExitUsage = 2,          // unknown flag, malformed value, missing subcommand
  kExitInvalidConfig = 3,  // well-formed but physically or logically invalid
  kExitCapExceeded = 4,    // sector dimension above the cap
  kExitIo = 5,             // output or config file not readable/writable
  kExitInternal = 6,
};

/// Parses a grid: "v", "v1,v2,...", or "start:stop:step" (inclusive of the
/// endpoint within half a step). Throws ConfigError.
std::vector<double> parse_grid(std::string_view text);

/// Runs one command line. Results go to `out` unless --out names a file;
/// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bcharge
