#include "geomag/cli.hpp"

int main(int argc, char** argv) { return geomag::cli::run(argc, argv); }
