#include <iostream>

#include "vtmv/cli.hpp"

int main(int argc, char** argv) { return vtmv::run_cli(argc, argv, std::cout, std::cerr); }
