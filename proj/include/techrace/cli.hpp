#pragma once

#include <iosfwd>

namespace techrace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;  // `validate` found a mismatch
inline constexpr int kExitUsage = 2;             // bad flags, names or values
inline constexpr int kExitFault = 3;             // numerical or I/O fault

// Entry point of the `techrace` tool. argv[0] is the program name.
int dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace techrace::cli
