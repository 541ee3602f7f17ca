#include <iostream>

#include "discwalk/cli.hpp"

int main(int argc, char** argv) { return discwalk::cli::run(argc, argv, std::cout, std::cerr); }
