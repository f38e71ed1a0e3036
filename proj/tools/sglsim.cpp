// SPDX-License-Identifier: Apache-2.0

#include "sgl/cli.hpp"

int main(int argc, char** argv) { return sgl::cli::main(argc, argv); }
