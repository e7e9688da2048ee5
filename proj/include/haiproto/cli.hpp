#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace haiproto::cli {

enum ExitStatus : int { ok = 0, check_failed = 1, usage_error = 2 };

// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace haiproto::cli
