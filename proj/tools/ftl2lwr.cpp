#include "ftl2lwr/harness.hpp"

int main(int argc, char** argv) { return ftl2lwr::run_cli(argc, argv); }
