#include <iostream>

#include "stochtube/app.hpp"

int main(int argc, char** argv) { return stochtube::run_cli(argc, argv, std::cout, std::cerr); }
