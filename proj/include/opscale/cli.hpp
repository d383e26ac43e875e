#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opscale {

// Runs one subcommand (args excludes the program name) and returns the
// process exit code: 0/1 encode boolean verdicts, 2 parse/schema/usage
// problems, 3 precision exhaustion. Reports go to `out`, diagnostics to
// `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err);

// FNV-1a 64-bit content digest, reported for reproducibility.
std::string content_digest(const std::string& bytes);

}  // namespace opscale
