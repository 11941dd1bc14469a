#include "fairlot/cli.hpp"

int main(int argc, char** argv) { return fairlot::run_command(argc, argv); }
