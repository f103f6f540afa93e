// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.

#include "cli.hpp"

int main(int argc, char** argv) { return brcl::cli::run(argc, argv); }
