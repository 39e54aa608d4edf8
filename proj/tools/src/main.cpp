#include <iostream>
#include <string>
#include <vector>

#include "vpbias/app/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vpbias::app::run(args, std::cout, std::cerr);
}
