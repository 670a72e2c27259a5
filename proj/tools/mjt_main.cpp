#include "mjt/cli.hpp"

int main(int argc, char** argv) { return mjt::run_cli(argc, argv); }
