#include <iostream>

#include "fci/cli.hpp"

int main(int argc, char** argv) {
  return fci::run_cli(argc, argv, std::cout, std::cerr);
}
