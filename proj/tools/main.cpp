#include "cli.hpp"

int main(int argc, char** argv) { return fracvamp::cli::cli_main(argc, argv); }
