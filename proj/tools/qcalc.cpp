#include <iostream>
#include <string>
#include <vector>

#include "qcalc/cli.hpp"

int main(int argc, char** argv) {
    return qcalc::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
