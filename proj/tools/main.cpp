#include "eisbfd/cli.hpp"

int main(int argc, char** argv) { return eisbfd::cli::run(argc, argv); }
