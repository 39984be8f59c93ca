#include <iostream>
#include <string>
#include <vector>

#include "spk2d/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return spk2d::run_cli(args, std::cout, std::cerr);
}
