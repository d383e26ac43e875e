#include <iostream>
#include <string>
#include <vector>

#include "opscale/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return opscale::cli_dispatch(args, std::cout, std::cerr);
}
