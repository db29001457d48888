#include "alce/commands.hpp"

int main(int argc, char** argv) { return alce::run_cli(argc, argv); }
