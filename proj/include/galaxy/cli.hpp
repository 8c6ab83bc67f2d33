#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace galaxy {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitUsage = 2;

// Worker count used when --threads is absent.
inline constexpr const char* kThreadsEnv = "GALAXY_THREADS";

// Runs one command line (args excludes the program name). Output is written
// only to `out` and `err`; nothing depends on the wall clock unless --timing
// is given.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace galaxy
