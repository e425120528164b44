#include <string>
#include <vector>

#include "ossdp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ossdp::cli::run(args);
}
