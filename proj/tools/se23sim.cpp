#include <iostream>

#include "loglin/sim/cli.hpp"

int main(int argc, char** argv) {
  return loglin::sim::run_cli(argc, argv, std::cout, std::cerr);
}
