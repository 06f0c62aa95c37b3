#include "exmass/cli.hpp"

int main(int argc, char** argv) { return exmass::cli::run(argc, argv); }
