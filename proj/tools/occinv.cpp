#include <iostream>

#include "occinv/cli/run.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return occinv::cli::run(args, std::cout, std::cerr);
}
