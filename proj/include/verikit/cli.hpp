#pragma once

#include <string>
#include <vector>

namespace verikit::cli {

// Dispatches to the curate / generate / evaluate / report / classify
// subcommands. args excludes the program name. Returns 0 on success, 1 on an
// operational failure, 2 on a usage error.
int run(std::vector<std::string> args);

}  // namespace verikit::cli
