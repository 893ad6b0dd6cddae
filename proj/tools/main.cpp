#include <iostream>
#include <string>
#include <vector>

#include "duhamel/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return duhamel::cli::parse_and_dispatch(args, std::cout, std::cerr);
}
