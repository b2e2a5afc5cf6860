#include <iostream>

#include "rppg/cli.hpp"

int main(int argc, char** argv) { return rppg::cli::run(argc, argv, std::cout, std::cerr); }
