#include <iostream>

#include "ectaks/cli.hpp"

int main(int argc, char** argv) {
  return ectaks::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
