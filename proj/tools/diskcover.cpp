#include <cstdlib>
#include <iostream>

#include <unistd.h>

#include "diskcover/cli.hpp"

int main(int argc, char** argv) {
  const bool color = std::getenv("NO_COLOR") == nullptr && isatty(STDERR_FILENO);
  return diskcover::run_cli(argc, argv, std::cout, std::cerr, color);
}
