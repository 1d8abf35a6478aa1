#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace phfb::cli {

enum ExitCode {
  kOk = 0,
  kInputError = 2,
  kInfeasible = 3,
  kCertificationFailure = 4,
};

/// Runs one command; `args` excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace phfb::cli
