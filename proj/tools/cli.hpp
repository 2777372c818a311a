#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ksgm::cli {

/// Runs the command line `args` (without the program name). Returns the exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace ksgm::cli
