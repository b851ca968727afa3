#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nodalab {

/// Runs the command line (args excludes the program name). Returns the exit code:
/// 0 pass, 1 tolerance or numerical failure, 2 usage or configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace nodalab
