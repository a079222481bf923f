#include <iostream>
#include <string>
#include <vector>

#include "listmix/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return listmix::run_cli(args, std::cout, std::cerr);
}
