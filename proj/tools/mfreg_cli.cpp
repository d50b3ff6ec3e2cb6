#include "mfreg/cli.hpp"

int main(int argc, char** argv) { return mfreg::run_cli(argc, argv); }
