#include "lognls/commands.hpp"

int main(int argc, char** argv) { return lognls::run_cli(argc, argv); }
