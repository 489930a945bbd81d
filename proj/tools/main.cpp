#include "idrkit/cli.hpp"

int main(int argc, char** argv) { return idrkit::run_cli(argc, argv); }
