#include "cli/app.hpp"

int main(int argc, char** argv) { return promptseg::cli::run(argc, argv); }
