#include <iostream>

#include "fvq/cli.hpp"

int main(int argc, char** argv) { return fvq::cli::run(argc, argv, std::cout, std::cerr); }
