#include <iostream>

#include "relbelief/cli/commands.hpp"

int main(int argc, char** argv) { return relbelief::cli::run_cli(argc, argv, std::cout, std::cerr); }
