#include "pla/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pla::cli::run(argc, argv, std::cout, std::cerr); }
