#include "relmetro_cli.hpp"

int main(int argc, char** argv) { return relmetro::cli::run(argc, argv); }
