#include "cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return sgsn::cli::run(argc, argv, std::cout, std::cerr); }
