#include "nollik/io.hpp"

int main(int argc, char** argv) { return nollik::run_cli(argc, argv); }
