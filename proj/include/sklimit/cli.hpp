#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sklimit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Entry point of the `sk-limit` tool. `args` excludes the program name.
///
///   sk-limit <simulate|sweep|singular|alpha|check> --config PATH
///            [--seed N] [--threads N] [--out DIR]
///   sk-limit preset <name>
///
/// Returns 0 on success, 1 on invalid input and 2 on numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sklimit
