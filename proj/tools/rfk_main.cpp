#include "rfk/cli.hpp"

int main(int argc, char** argv) { return rfk::cli::run(argc, argv); }
