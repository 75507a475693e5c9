#include "morphtag/cli.hpp"

int main(int argc, char** argv) { return morphtag::cli::run(argc, argv); }
