#include "app.hpp"

int main(int argc, char** argv) { return cpsurf::cli::run_cli(argc, argv); }
