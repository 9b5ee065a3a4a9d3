// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "kfrag_cli.hpp"

int main(int argc, char** argv)
{
    return kfrag::cli::run_cli(argc, argv, std::cout, std::cerr);
}
