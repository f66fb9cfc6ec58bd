#include "boxlab/cli.hpp"

int main(int argc, char** argv) { return boxlab::cli(argc, argv); }
