// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "purnet/cli.hpp"

int main(int argc, char** argv) { return purnet::cli::run(argc, argv, std::cout, std::cerr); }
