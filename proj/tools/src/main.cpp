#include "dualwave/cli.hpp"

int main(int argc, char** argv) { return dualwave::cli::run(argc, argv); }
