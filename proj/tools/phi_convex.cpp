#include "phiconvex/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return phiconvex::cli::main_entry(argc, argv, std::cout, std::cerr);
}
