#include "dirlaw/cli.hpp"

int main(int argc, char** argv) { return dirlaw::cli::run(argc, argv); }
