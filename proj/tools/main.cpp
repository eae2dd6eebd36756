#include "ocular/service/cli.hpp"

int main(int argc, char** argv) { return ocular::cli::dispatch(argc, argv); }
