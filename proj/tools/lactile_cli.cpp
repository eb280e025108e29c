#include "lactile/harness/cli.hpp"

int main(int argc, char** argv) { return lactile::harness::run_cli(argc, argv); }
