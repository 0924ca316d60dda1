#include "qes/cli.hpp"

int main(int argc, char** argv) { return qes::cli::main_entry(argc, argv); }
