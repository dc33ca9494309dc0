#include <iostream>
#include <string>
#include <vector>

#include "amortized/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return amortized::run_command(args, std::cout, std::cerr);
}
