#pragma once

#include <iosfwd>

namespace swat::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

// Entry point of the `swat` binary: buckets, train, eval, simulate, verify.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swat::cli
