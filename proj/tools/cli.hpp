#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace beamlearn::cli {

/// Runs one command line (args[0] is the program name). Returns the process
/// exit status: 0 on success, 1 on a usage error, 2 on a runtime failure.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace beamlearn::cli
