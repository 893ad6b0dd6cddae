#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace duhamel::cli {

/// Parse argv-style arguments (program name excluded) and run the matching
/// subcommand.  Records go to `out` (or the --out path), diagnostics to `err`.
/// Returns the process exit code: 0 success, 1 when any emitted report is
/// unsatisfied, 2 on usage or configuration errors.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace duhamel::cli
