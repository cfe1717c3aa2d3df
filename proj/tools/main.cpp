#include "spocb_cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return spocb::cli::run_command(args);
}
