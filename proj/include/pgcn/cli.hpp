#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pgcn::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNumerical = 2,
  kIo = 3,
};

/// Entry point behind the pgcn executable. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pgcn::cli
