#include <iostream>

#include "ffdist/cli.hpp"

int main(int argc, char** argv) { return ffdist::run_cli(argc, argv, std::cout, std::cerr); }
