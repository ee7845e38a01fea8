#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chemkd::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kIoError = 3,
};

/// Runs one command line (without the program name) in-process. Normal
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Same, for a classic argc/argv pair, printing to stdout and stderr.
int run(int argc, const char* const* argv);

}  // namespace chemkd::cli
