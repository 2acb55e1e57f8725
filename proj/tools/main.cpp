#include <vector>

#include "flowstitch/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return flowstitch::cli::run(args);
}
