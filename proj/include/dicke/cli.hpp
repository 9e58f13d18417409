#pragma once

#include <iosfwd>

namespace dicke {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

/// Entry point for the `dicke` executable. Tables and reports go to `out`
/// unless --out is given; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dicke
