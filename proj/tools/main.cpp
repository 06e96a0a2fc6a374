#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return fasthymix::cli::run(argc, argv, std::cerr); }
