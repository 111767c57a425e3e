#include <iostream>

#include "techrace/cli.hpp"

int main(int argc, char** argv) {
  return techrace::cli::dispatch(argc, argv, std::cout, std::cerr);
}
