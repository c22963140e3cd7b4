#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return ed4::run_cli(argc, argv, std::cout, std::cerr); }
