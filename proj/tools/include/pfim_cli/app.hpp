#pragma once

#include <iosfwd>

namespace pfim::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNotConverged = 2 };

/// Entry point of the pfim tool: solve, convergence, continue and compare.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pfim::cli
