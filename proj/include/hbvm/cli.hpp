#pragma once

#include <iosfwd>

namespace hbvm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSolver = 2;

/// Entry point of the `hbvm` tool. Subcommands: tableau, integrate, converge, drift.
/// Returns 0 on success, 1 on usage errors, 2 on solver failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hbvm::cli
