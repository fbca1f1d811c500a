#include <iostream>

#include "stochcert/cli.hpp"

int main(int argc, char** argv) { return stochcert::run_cli(argc, argv, std::cout, std::cerr); }
