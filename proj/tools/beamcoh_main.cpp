#include <string>
#include <vector>

#include "beamcoh/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return beamcoh::cli::run_cli(args);
}
