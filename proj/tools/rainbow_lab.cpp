#include "rainbow/cli.hpp"

int main(int argc, char** argv) { return rainbow::cli::run_cli(argc, argv); }
