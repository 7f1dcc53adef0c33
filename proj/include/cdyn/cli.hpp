#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdyn {

/// Runs the command line tool on `args` (without the program name). JSON
/// reports go to `out` unless --report names a file; human-readable tables
/// and diagnostics go to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Expands every "--config FILE" into "--key=value" tokens placed right after
/// the subcommand words, so that flags given on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace cdyn
