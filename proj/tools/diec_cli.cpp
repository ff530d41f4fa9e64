#include "diec/cli.hpp"

int main(int argc, char** argv) {
    return diec::cli::run(argc, argv);
}
