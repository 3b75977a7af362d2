// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "oafmtl/cli.hpp"

int main(int argc, char** argv) { return oafmtl::run_cli(argc, argv, std::cout, std::cerr); }
