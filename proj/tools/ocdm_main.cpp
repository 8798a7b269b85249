#include "ocdm/cli_app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ocdm::cli::cli_main(args);
}
