#pragma once

#include <iosfwd>

namespace ed4 {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitData = 4;

// Entry point of the ed4 tool. Data goes to `out`, logs and errors to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ed4
