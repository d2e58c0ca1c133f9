#include <iostream>

#include "powrace/cli.hpp"

int main(int argc, char** argv) {
    return powrace::cli::run(argc, argv, std::cout, std::cerr);
}
