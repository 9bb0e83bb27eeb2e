#include <iostream>

#include "coulomb/cli.hpp"

int main(int argc, char** argv) { return coulomb::cli::run(argc, argv, std::cout, std::cerr); }
