#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace minmax_match::cli {

/// Exit codes of every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAborted = 1;  ///< evaluation started but could not finish
inline constexpr int kExitUsage = 2;    ///< bad flags or unusable input

/// Runs the tool with `args` (program name excluded). Normal output goes to
/// `out`; diagnostics go to `err`, errors as a single `error: ...` line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace minmax_match::cli
