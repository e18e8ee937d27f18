#include <iostream>

#include "jetflag/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return jetflag::cli::run(args, std::cout, std::cerr);
}
