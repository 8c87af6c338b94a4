#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cliffedge {

// Runs the command line given argv-style arguments (without the program
// name). Returns the process exit code: 0 on success, 2 for missing input
// files, 1 for any other failure (including oracle-check disagreement).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cliffedge
