#include "wearlca/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return wearlca::cli::run_cli(argc, argv, std::cout, std::cerr);
}
