#include <iostream>

#include "ccss/cli.hpp"

int main(int argc, char** argv) {
  return ccss::cli::run({argv + 1, argv + argc}, std::cin, std::cout, std::cerr);
}
