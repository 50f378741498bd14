#include "fieldroad/cli.hpp"

int main(int argc, char** argv) { return fieldroad::cli_main(argc, argv); }
