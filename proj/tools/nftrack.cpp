#include "nftrack/cli.hpp"

int main(int argc, char** argv) { return nftrack::run_cli(argc, argv); }
