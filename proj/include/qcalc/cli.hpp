#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcalc::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit code. Subcommands: density, figure, verify, order, risk.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcalc::cli
