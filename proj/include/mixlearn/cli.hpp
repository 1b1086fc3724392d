#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixlearn {

// Command-line front end; returns the process exit code.
// Subcommands: gen | learn | exp | formulas | project-check | select.
// Exit codes: 0 success, 1 check failed (project-check residuals),
// 2 config/input error, 3 budget error, 4 numerical guard.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mixlearn
