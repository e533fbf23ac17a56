#include <iostream>

#include "survsynth/cli.hpp"

int main(int argc, char** argv) { return survsynth::cli::run(argc, argv, std::cout, std::cerr); }
