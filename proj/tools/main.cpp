#include "spin1/cli.hpp"

int main(int argc, char** argv) { return spin1::cli_main(argc, argv); }
