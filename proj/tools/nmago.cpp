#include <iostream>
#include <string>
#include <vector>

#include "nmago/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return nmago::run(args, std::cout, std::cerr);
}
