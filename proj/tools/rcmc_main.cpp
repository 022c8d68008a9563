#include <string>
#include <vector>

#include "rc/lab.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rc::run_cli(args);
}
