#include "ek/cli.hpp"

int main(int argc, char** argv) { return ek::cli::run(argc, argv); }
