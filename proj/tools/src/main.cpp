#include <iostream>

#include "pfim_cli/app.hpp"

int main(int argc, char** argv) { return pfim::cli::run(argc, argv, std::cout, std::cerr); }
