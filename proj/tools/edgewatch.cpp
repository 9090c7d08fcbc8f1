#include <iostream>

#include "edgewatch/cli.hpp"

int main(int argc, char** argv) { return edgewatch::cli::run(argc, argv, std::cout, std::cerr); }
