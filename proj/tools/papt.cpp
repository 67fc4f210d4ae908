#include "papt/cli_runner.hpp"

int main(int argc, char** argv) { return papt::cli::main_entry(argc, argv); }
