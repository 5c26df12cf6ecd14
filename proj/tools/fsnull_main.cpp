#include <iostream>

#include "fsnull/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fsnull::execute(args, std::cout, std::cerr);
}
