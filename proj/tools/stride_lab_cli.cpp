#include "stride_lab/bench/cli.hpp"

int main(int argc, char** argv) { return stride_lab::bench::cli_main(argc, argv); }
