#include <string>
#include <vector>

#include "tefdtd/cli.hpp"

int main(int argc, char** argv) {
    return tefdtd::cli_entry(std::vector<std::string>(argv + 1, argv + argc));
}
