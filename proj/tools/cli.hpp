#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lemmings::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line (args excludes the program name). Errors are printed
// to `err` as a single line `lemmings: <usage|runtime> error: <message>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lemmings::cli
