#pragma once

#include <iosfwd>

namespace literalis::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;  // schema or domain error
inline constexpr int kExitIo = 2;
inline constexpr int kExitUsage = 64;

/// Runs one command line. Results go to `out`, diagnostics and logs to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace literalis::cli
