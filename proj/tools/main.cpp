#include "chemkd/cli.hpp"

int main(int argc, char** argv) { return chemkd::cli::run(argc, argv); }
