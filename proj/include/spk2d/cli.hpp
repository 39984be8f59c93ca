#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spk2d {

// Runs one command line (args[0] is the program name). Structured results go
// to out, diagnostics and wall time to err. Returns the process exit code:
// 0 pass, 1 numeric-check fail, 2 parse, 3 domain/path, 4 I/O.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spk2d
