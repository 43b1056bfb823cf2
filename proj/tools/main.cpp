#include "melkit/cli.hpp"

int main(int argc, char** argv) { return melkit::cli::run_cli(argc, argv); }
