#include <iostream>

#include "ruleclip/cli/cli.hpp"

int main(int argc, char** argv) { return ruleclip::cli::run_cli(argc, argv, std::cout, std::cerr); }
