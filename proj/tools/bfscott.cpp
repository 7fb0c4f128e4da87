#include <exception>
#include <iostream>

#include "bfscott/cli.hpp"

int main(int argc, char** argv) {
  try {
    return bfscott::cli::run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
}
