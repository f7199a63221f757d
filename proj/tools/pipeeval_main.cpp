#include <pipeeval/cli.hpp>

int main(int argc, char** argv) { return pipeeval::cli::run(argc, argv); }
