#pragma once

#include <string>
#include <vector>

namespace lulc::cli {

// Runs one subcommand. Returns 0 on success, 1 on validation/usage errors,
// 2 on I/O errors. Diagnostics go to stderr; results go to files or stdout.
int run(int argc, const char* const* argv);

// Convenience for tests: args exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace lulc::cli
