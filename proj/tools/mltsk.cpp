#include <iostream>

#include "mltsk/cli.hpp"

int main(int argc, char** argv) { return mltsk::cli::run(argc, argv, std::cout, std::cerr); }
