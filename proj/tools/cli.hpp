#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tcx::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kData = 2;
inline constexpr int kCompute = 3;

// Runs the tcx command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcx::cli
