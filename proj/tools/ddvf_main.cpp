#include "ddvf/cli.hpp"

int main(int argc, char** argv) {
    return ddvf::run_cli(argc, argv);
}
