#include <iostream>
#include <string>
#include <vector>

#include "atelier/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return atelier::cli::run(args, std::cout, std::cerr);
}
