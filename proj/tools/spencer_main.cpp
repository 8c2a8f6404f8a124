#include "spencer/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return spencer::run_cli(argc, argv, std::cout, std::cerr); }
