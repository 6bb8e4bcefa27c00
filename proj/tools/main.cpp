#include "cartan_lab/cli.hpp"

int main(int argc, char** argv) { return cartan_lab::cli::main(argc, argv); }
