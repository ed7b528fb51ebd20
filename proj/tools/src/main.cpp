#include <iostream>

#include "anodec/cli/commands.hpp"

int main(int argc, char** argv) { return anodec::cli::run_cli(argc, argv, std::cout, std::cerr); }
