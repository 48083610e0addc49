#include <iostream>
#include <string>
#include <vector>

#include "cgla/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cgla::run(args, std::cout, std::cerr);
}
