#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hdfa::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kCompileFailed = 2,
  kIoFailed = 3,
  kDiverged = 4,
};

/// Runs one command line (without the program name) and returns its exit
/// code. Everything is written to `out` and `err`, never to std streams.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hdfa::cli
