#include <iostream>
#include <string>
#include <vector>

#include "fmreg/commands.hpp"

int main(int argc, char** argv) {
    return fmreg::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
