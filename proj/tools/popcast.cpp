#include <iostream>

#include "popcast/cli/commands.hpp"

int main(int argc, char** argv) { return popcast::cli::run_cli(argc, argv, std::cout, std::cerr); }
