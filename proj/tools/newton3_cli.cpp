#include "newton3/cli_app.hpp"

int main(int argc, char** argv) { return newton3::cli_main(argc, argv); }
