#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  try {
    return patchwarp::cli::run(argc, argv, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return patchwarp::cli::kExitFailure;
  }
}
