#include "mindsculpt/cli.hpp"

#include <csignal>
#include <iostream>

namespace {
void on_interrupt(int) { mindsculpt::cli::interrupt_flag().store(true); }
}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  return mindsculpt::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
