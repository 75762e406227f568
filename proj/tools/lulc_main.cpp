#include "lulc/cli.hpp"

int main(int argc, char** argv) { return lulc::cli::run(argc, argv); }
