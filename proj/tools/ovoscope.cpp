#include <iostream>

#include "ovoscope/cli.hpp"

int main(int argc, char** argv) {
  return ovoscope::cli::run(argc, argv, std::cout, std::cerr);
}
