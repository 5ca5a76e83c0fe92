#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mwlab::cli {

enum ExitCode : int {
    kAllPass = 0,
    kCheckFailed = 1,
    kUsage = 2,
    kResource = 3,
};

/// Parses args (without the program name), runs the subcommand and writes
/// the manifest to out, or to the --out path. Diagnostics go to err.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mwlab::cli
