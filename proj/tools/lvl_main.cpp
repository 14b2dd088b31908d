#include <iostream>

#include "lvl/cli.hpp"

int main(int argc, char** argv) { return lvl::run_cli(argc, argv, std::cout, std::cerr); }
