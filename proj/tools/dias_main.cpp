#include "dias/cli.hpp"

int main(int argc, char** argv) { return dias::io::cli(argc, argv); }
