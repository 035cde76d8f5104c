#pragma once

#include <atomic>
#include <ostream>
#include <string>
#include <vector>

namespace mindsculpt::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kIo = 4 };

// Runs one subcommand. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Set from a signal handler to end a running `run` subcommand.
std::atomic<bool>& interrupt_flag();

}  // namespace mindsculpt::cli
