#include <iostream>

#include <tcdm/cli/commands.hpp>

int main(int argc, char** argv) { return tcdm::cli::run(argc, argv, std::cout, std::cerr); }
