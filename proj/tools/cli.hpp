#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ssync::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kIo = 3 };

inline constexpr const char* kBenchHeader = "n,sigma,tau,repr,bits,build_ns,query_ns";

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssync::cli
