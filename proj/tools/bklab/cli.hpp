#pragma once

#include <ostream>

namespace bklab::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDomain = 2;
inline constexpr int kNumerical = 3;
inline constexpr int kIo = 4;
inline constexpr int kViolations = 5;  // verify found failing checks

/// Parses argv (argv[0] is the program name), runs the subcommand and writes
/// its report to `out` or to --out. Diagnostics go to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bklab::cli
