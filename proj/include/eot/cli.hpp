#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace eot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `eot` command line. `args` excludes the program name. Results go
/// to `out` (or the file named by `--out`), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eot::cli
