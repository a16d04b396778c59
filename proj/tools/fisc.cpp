#include "fisc/cli/app.hpp"

int main(int argc, char** argv) { return fisc::cli::run(argc, argv); }
