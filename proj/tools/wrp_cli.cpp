#include "wrp/cli.hpp"

int main(int argc, char** argv) { return wrp::cli_main(argc, argv); }
