#include <iostream>

#include "archon/cli.hpp"

int main(int argc, char** argv) {
    return archon::cli_run(argc, argv, std::cout, std::cerr);
}
