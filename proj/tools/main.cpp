#include <iostream>
#include <string>
#include <vector>

#include "cliffedge/cli_app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cliffedge::run_cli(args, std::cout, std::cerr);
}
