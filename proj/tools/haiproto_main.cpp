#include <iostream>

#include "haiproto/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return haiproto::cli::run(args, std::cout, std::cerr);
}
