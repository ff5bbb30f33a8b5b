#include "snowembed/cli.hpp"

int main(int argc, char** argv) { return snowembed::cli::run(argc, argv); }
