#include "cli.hpp"

int main(int argc, char** argv) { return crad::cli::run(argc, argv); }
