#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace csviu::cli {

/// Runs one command line (args[0] is the program name). Returns 0 on
/// success, 1 on invalid input, 2 when a solver fails to converge.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace csviu::cli
