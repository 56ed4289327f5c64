#include <iostream>

#include "wavefield/cli.hpp"

int main(int argc, char** argv) { return wavefield::cli::run(argc, argv, std::cout, std::cerr); }
