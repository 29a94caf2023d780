#include "eegnet/cli.hpp"

int main(int argc, char** argv) {
    return eegnet::cli::run(argc, argv);
}
