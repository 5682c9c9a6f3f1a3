#include <iostream>

#include "g2t/cli.hpp"

int main(int argc, char** argv) { return g2t::run_cli(argc, argv, std::cout, std::cerr); }
