#include "zonalstab/cli.hpp"

int main(int argc, char** argv) { return zonal::cli::run(argc, argv); }
