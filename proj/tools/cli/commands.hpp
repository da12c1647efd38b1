#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace safe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitQueryError = 1;
inline constexpr int kExitUsage = 2;

// Arguments exclude the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace safe::cli
