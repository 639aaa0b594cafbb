#include "ricci/cli.hpp"

int main(int argc, char** argv) { return ricci::cli::run_cli(argc, argv); }
