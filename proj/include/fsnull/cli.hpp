#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fsnull {

inline constexpr std::string_view kVersion = "0.1.0";

/// Exit codes of `execute`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. `args` excludes the program name. Progress lines
/// and errors go to `err`; help and version text to `out`.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fsnull
