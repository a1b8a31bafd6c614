#include <iostream>
#include <string>
#include <vector>

#include "slpspan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return slpspan::cli::run(args, std::cout, std::cerr);
}
