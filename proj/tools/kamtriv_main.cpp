#include "kamtriv/cli.hpp"

int main(int argc, char** argv) { return kamtriv::cli::run(argc, argv); }
