#pragma once

// The coarse-lab command line. Exit codes: 0 success, 2 invalid input,
// 3 resource, margin or numerical failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace coarse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitResource = 3;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace coarse::cli
