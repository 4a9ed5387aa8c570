#include "efxw/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return efxw::cli::run_cli(argc, argv, std::cout, std::cerr); }
