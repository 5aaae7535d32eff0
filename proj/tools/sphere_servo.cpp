#include <iostream>

#include "sphere_servo/cli.hpp"

int main(int argc, char** argv) {
  return sphere_servo::cli::main(argc, argv, std::cout, std::cerr);
}
