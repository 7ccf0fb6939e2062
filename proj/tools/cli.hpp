#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tpnl::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,           // all checks pass / nothing found
  kViolation = 1,    // an identity failed in check or verify
  kInputError = 2,   // bad flags, files, or names
  kFinding = 3,      // the hunter found a counterexample candidate
};

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tpnl::cli
