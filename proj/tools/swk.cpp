#include "swk/cli/commands.hpp"

int main(int argc, char** argv) { return swk::cli::run(argc, argv); }
