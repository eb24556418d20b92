#include "inrlab/cli.hpp"

int main(int argc, char** argv) { return inrlab::cli_main(argc, argv); }
