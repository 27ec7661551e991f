#pragma once

// Command-line frontend.  Every subcommand writes one JSON report (or a
// space file / CSV series) and maps its outcome to an exit code:
//   0  success, all assertions hold
//   1  an assertion failed; the report is still written
//   2  usage or input error

#include <iosfwd>
#include <string>
#include <vector>

namespace alexkit::cli {

inline constexpr const char* kToolName = "alexkit";
inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;

/// Runs the tool on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// main() adapter.
int run(int argc, char** argv);

}  // namespace alexkit::cli
