#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitAssert = 2;

/// Runs the command line `args` (without the program name). Reports go to
/// files under --out-dir; progress and diagnostics to `out` and `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace stit::cli
