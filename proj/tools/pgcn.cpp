#include <iostream>
#include <string>
#include <vector>

#include "pgcn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pgcn::cli::run(args, std::cout, std::cerr);
}
