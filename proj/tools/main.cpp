#include <iostream>

#include "muxcent/cli.hpp"

int main(int argc, char** argv) { return muxcent::cli::runCli(argc, argv, std::cout, std::cerr); }
