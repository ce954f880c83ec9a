#include <string>
#include <vector>

#include "rtd/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rtd::cli::run(args);
}
