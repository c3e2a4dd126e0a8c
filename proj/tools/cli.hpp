#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ptsym::cli {

enum ExitCode : int { ok = 0, invalid_config = 2, numerical_failure = 3 };

// Runs one command line (args[0] is the subcommand). Data go to `out` unless
// --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Flat key = value lines; '#' starts a comment. Keys are normalized to the
// flag spelling ('_' becomes '-'). Throws DomainError on malformed lines.
std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in);

// Shortest representation that reads back to the same double.
std::string format_double(double v);

}  // namespace ptsym::cli
