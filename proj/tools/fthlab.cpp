#include <iostream>
#include <string>
#include <vector>

#include "fthlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fthlab::execute(args, std::cout, std::cerr);
}
