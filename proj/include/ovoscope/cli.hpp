#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ovoscope::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kValidation = 3,
  kConvergenceWarning = 4,
};

// Entry point of the `ovoscope` tool; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ovoscope::cli
