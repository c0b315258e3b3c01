#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mmc::cli {

/// Runs one command. `args` excludes the program name. Returns the process
/// exit status: 0 success, 1 invalid input, 2 failed computation. Errors are
/// written to `err` as one-line JSON objects.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmc::cli
