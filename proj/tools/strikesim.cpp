#include "strikesim/cli.hpp"

int main(int argc, char** argv) { return strikesim::cli_main(argc, argv); }
