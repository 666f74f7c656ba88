#include <iostream>

#include "mvcodes/cli.hpp"

int main(int argc, char** argv) { return mvcodes::run_cli(argc, argv, std::cout, std::cerr); }
