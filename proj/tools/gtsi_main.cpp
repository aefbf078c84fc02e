#include "gtsi/cli.hpp"

int main(int argc, char** argv) { return gtsi::cli_main(argc, argv); }
