#include "irlab/experiment.hpp"

int main(int argc, char** argv) { return irlab::cli_main(argc, argv); }
