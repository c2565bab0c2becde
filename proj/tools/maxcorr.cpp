#include <iostream>

#include "maxcorr/cli.hpp"

int main(int argc, char** argv) {
  return maxcorr::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}
