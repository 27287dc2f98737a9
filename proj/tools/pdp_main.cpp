#include <iostream>
#include <string>
#include <vector>

#include "pdp/cli.hpp"

int main(int argc, char** argv) {
    return pdp::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
