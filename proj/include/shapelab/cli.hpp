#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shapelab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;

/// Entry point of the `shapelab` tool. `args` excludes the program name.
/// Files are written only after every computation succeeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* tool_version();

}  // namespace shapelab
