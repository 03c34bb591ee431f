#include "distvar/cli.hpp"

int main(int argc, char** argv) { return distvar::run_cli(argc, argv); }
