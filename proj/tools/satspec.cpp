#include <iostream>

#include "satspec/cli.hpp"

int main(int argc, char** argv) { return satspec::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
