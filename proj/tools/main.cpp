#include "lachesis/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return lachesis::runCli(argc, argv, std::cout, std::cerr);
}
