#include "alexkit/cli.hpp"

int main(int argc, char** argv) { return alexkit::cli::run(argc, argv); }
