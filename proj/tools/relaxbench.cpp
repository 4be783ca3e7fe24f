#include "relax/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return relax::run_cli(argc, argv, std::cout, std::cerr); }
