#include <iostream>

#include "fuzzyflow/cli.hpp"

int main(int argc, char** argv) {
  return fuzzyflow::cli::run_command_line(argc, argv, std::cout, std::cerr);
}
