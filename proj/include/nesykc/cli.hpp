#pragma once

// Command-line front end. Exit codes: 0 success, 2 bad input, 3 intractable or
// unsupported route, 4 unsatisfiable, 5 oracle cap exceeded.

#include <ostream>
#include <string>
#include <vector>

namespace nesykc {

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nesykc
