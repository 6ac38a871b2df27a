#include <iostream>

#include "parapack/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return parapack::run_cli(args, std::cout, std::cerr);
}
