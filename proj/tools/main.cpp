#include "fml/cli.hpp"

int main(int argc, char** argv) { return fml::run_cli(argc, argv); }
