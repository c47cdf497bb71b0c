#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace engram::cli {

// Runs one CLI invocation (arguments without the program name).
// Exit codes: 0 success, 2 usage/validation, 3 I/O, 4 remote-service failure.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace engram::cli
