#include "mfgap/cli.hpp"

int main(int argc, char** argv) { return mfgap::cli::main(argc, argv); }
