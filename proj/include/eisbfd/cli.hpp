#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eisbfd::cli {

inline constexpr int kExitSuccess = 0;
/// Numerical failure, refused step size or failed certification.
inline constexpr int kExitFailure = 1;
/// Malformed command line, configuration or input file.
inline constexpr int kExitUsage = 2;

/// Entry point of the `eisbfd` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

/// Accepts a decimal, a fraction p/q, or `optimal` (-4/13).
double parse_c(const std::string& text);

}  // namespace eisbfd::cli
