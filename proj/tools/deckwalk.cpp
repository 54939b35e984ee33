#include <iostream>

#include "deckwalk/cli.hpp"

int main(int argc, char** argv) { return deckwalk::run_cli(argc, argv, std::cout, std::cerr); }
