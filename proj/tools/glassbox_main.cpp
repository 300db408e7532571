#include "glassbox/cli.hpp"

int main(int argc, char** argv) { return glassbox::run_cli(argc, argv); }
