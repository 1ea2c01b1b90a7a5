#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace glmdisc::cli {

/// Runs one subcommand. Returns the process exit code; diagnostics go to `err`
/// and human-readable summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace glmdisc::cli
