#include "ixa/cli.hpp"

int main(int argc, char** argv) { return ixa::cli::dispatch(argc, argv); }
