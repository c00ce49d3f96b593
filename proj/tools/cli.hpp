#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ivreg::cli {

enum ExitCode : int { ok = 0, invariant_failure = 1, input_error = 2 };

/// Runs the ivreg command line with `args` (excluding the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ivreg::cli
