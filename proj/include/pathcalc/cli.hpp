#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pathcalc {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

/// Runs one `pathcalc` invocation.  `args` excludes the program name.
/// Subcommands: derive, frechet, sfde-sim, verify-ito, verify-generator,
/// coherence, accept.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pathcalc
