#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lfpca::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs `lfpca <args...>` (args exclude the program name). Normal output goes
/// to `out`, diagnostics and warnings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lfpca::cli
