#include "orthofit/cli.hpp"

int main(int argc, char** argv) { return orthofit::cli_main(argc, argv); }
