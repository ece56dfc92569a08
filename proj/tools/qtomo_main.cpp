#include <iostream>

#include "qtomo/cli.hpp"

int main(int argc, char** argv) {
  return qtomo::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
