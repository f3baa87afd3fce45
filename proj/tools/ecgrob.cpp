// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "ecgrob/cli.hpp"

int main(int argc, char** argv) { return ecgrob::cli::run(argc, argv, std::cout, std::cerr); }
