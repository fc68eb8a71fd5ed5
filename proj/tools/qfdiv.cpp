#include <iostream>

#include "cli_commands.hpp"

int main(int argc, char** argv) { return qfdiv::cli::run_cli(argc, argv, std::cout, std::cerr); }
