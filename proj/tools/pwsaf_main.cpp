#include <iostream>

#include "pwsaf/cli.hpp"

int main(int argc, char** argv) { return pwsaf::cli::run_command(argc, argv, std::cout, std::cerr); }
