#include "labelforge/cli.hpp"

int main(int argc, char** argv) { return labelforge::cli::main(argc, argv); }
