#include <iostream>

#include "hintkit/cli.hpp"

int main(int argc, char** argv) { return hintkit::run_cli(argc, argv, std::cout, std::cerr); }
