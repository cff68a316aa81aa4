#include <iostream>
#include <string>
#include <vector>

#include "gprnn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gprnn::cli::run(args, std::cout, std::cerr);
}
