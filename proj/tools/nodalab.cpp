#include "nodalab/cli.hpp"

int main(int argc, char** argv) { return nodalab::run_cli(argc, argv); }
