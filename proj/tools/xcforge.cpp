#include "xcforge/cli.hpp"

int main(int argc, char** argv) { return xcforge::cli::run(argc, argv); }
