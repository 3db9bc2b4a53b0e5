#pragma once

#include <iosfwd>

namespace mltsk::cli {

/// Exit codes: 0 success, 1 runtime or numerical failure, 2 usage or
/// validation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `mltsk` tool; subcommands train, predict, cv, grid,
/// ablate, corr-report and stats.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mltsk::cli
