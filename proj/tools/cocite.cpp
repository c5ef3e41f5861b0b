#include "cocite/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cocite::cli::run(argc, argv, std::cout, std::cerr); }
