#include <iostream>

#include "dnorm_cli/commands.hpp"

int main(int argc, char** argv) { return dnorm::cli::run(argc, argv, std::cout, std::cerr); }
