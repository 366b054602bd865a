#pragma once

#include <iosfwd>

namespace wearlca::cli {

/// Exit codes: 0 success, 1 usage or I/O error, 2 invalid input
/// (manifest, scenario, family mix), 3 metric or LCA computation failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitComputation = 3;

/// Runs one `wearlca` invocation. Diagnostics go to `err`, progress to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}
