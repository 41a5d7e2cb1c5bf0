#include <iostream>

#include "bklab/cli.hpp"

int main(int argc, char** argv) { return bklab::cli::dispatch(argc, argv, std::cout, std::cerr); }
