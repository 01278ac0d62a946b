#include "levyspde/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return levyspde::cli::run(argc, argv, std::cout, std::cerr); }
