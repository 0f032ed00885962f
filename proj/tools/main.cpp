// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) { return targetfill::cli::main(argc, argv, std::cout, std::cerr); }
