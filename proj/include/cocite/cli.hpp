#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cocite::cli {

inline constexpr const char* kToolVersion = "0.3.0";

// Exit codes: 0 success, 1 data/validation error, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Convenience for tests; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cocite::cli
