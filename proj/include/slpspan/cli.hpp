#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace slpspan::cli {

/// Exit codes: 0 success / true, 1 false, 2 usage error, 3 runtime error.
constexpr int kTrue = 0;
constexpr int kFalse = 1;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

/// Environment variable holding the byte cap for relation computation.
constexpr const char* kMemoryCapVariable = "SLPSPAN_MEMORY_CAP";

/// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slpspan::cli
