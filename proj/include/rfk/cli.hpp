#pragma once

#include <string>
#include <vector>

namespace rfk::cli {

// Full command-line entry point. Exit codes: 0 success, 2 validation error,
// 3 I/O error, 4 configuration error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without the program name

}  // namespace rfk::cli
