#include <iostream>

#include "bcharge/cli.hpp"

int main(int argc, char** argv) { return bcharge::run_cli(argc, argv, std::cout, std::cerr); }
