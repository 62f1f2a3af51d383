#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chedra::cli {

enum ExitCode { kPass = 0, kError = 1, kValidationFailure = 2 };

// Runs one invocation; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chedra::cli
