#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cogload {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

// Runs one CLI invocation in-process; `args` excludes the program name.
// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cogload
