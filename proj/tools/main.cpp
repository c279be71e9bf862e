#include <iostream>

#include "corridor_cli.hpp"

int main(int argc, char** argv) { return corridor::cli::run(argc, argv, std::cout, std::cerr); }
