#include <infbandit/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return infbandit::cli_main(argc, argv, std::cout, std::cerr); }
