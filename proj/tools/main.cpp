#include "trendguard/cli.hpp"

int main(int argc, char** argv) { return trendguard::cli::run(argc, argv); }
