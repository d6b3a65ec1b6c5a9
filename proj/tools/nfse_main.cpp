#include "nfse/cli.hpp"

int main(int argc, char** argv) { return nfse::cli_main(argc, argv); }
