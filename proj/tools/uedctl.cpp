#include <iostream>

#include "ued/pipeline/cli.hpp"

int main(int argc, char** argv) { return ued::pipeline::run_cli(argc, argv, std::cout, std::cerr); }
