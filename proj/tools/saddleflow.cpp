#include <iostream>

#include "saddleflow/cli.hpp"

int main(int argc, char** argv) {
  return saddleflow::cli::main(argc, argv, std::cout, std::cerr);
}
