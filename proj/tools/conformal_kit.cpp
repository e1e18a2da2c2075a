#include <iostream>
#include <string>
#include <vector>

#include "conformal/cli/run.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return conformal::cli::main_entry(args, std::cout, std::cerr);
}
