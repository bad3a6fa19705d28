#include "witness_forge/cli.hpp"

int main(int argc, char** argv) { return witness_forge::cli::run(argc, argv); }
