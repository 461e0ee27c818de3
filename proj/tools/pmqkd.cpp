#include "pmqkd/cli.hpp"

int main(int argc, char** argv) { return pmqkd::cli::run(argc, argv); }
