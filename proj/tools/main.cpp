#include "commands.hpp"

int main(int argc, char** argv) { return scsc::cli::run_cli(argc, argv); }
