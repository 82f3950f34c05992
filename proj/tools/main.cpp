#include "cascadefuse/cli.hpp"

int main(int argc, char** argv) { return cascadefuse::run_command(argc, argv); }
