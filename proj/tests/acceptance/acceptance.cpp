// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Runs acceptance criteria and prints one line per criterion.
//
//   brcl_acceptance [--replicates R] [--workers W] [id ...]
//
// With no ids every criterion runs. Exit status is 0 only if all pass.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "verify.hpp"

int main(int argc, char** argv) {
  brcl::verify::Scale scale;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if ((a == "--replicates" || a == "--workers") && i + 1 < argc) {
      const auto v = std::stoul(argv[++i]);
      if (a == "--workers") {
        scale.workers = static_cast<unsigned>(v);
      } else {
        scale.growth_replicates = v;
        scale.rate_replicates = v;
      }
    } else {
      ids.push_back(std::stoi(a));
    }
  }
  if (ids.empty())
    for (int id = 1; id <= 10; ++id) ids.push_back(id);

  bool all = true;
  for (int id : ids) {
    brcl::verify::CriterionResult r;
    try {
      r = id == 10 ? brcl::verify::criterion10(std::filesystem::temp_directory_path() /
                                                ("brcl-acceptance-" + std::to_string(::getpid())))
                   : brcl::verify::run_criterion(id, scale);
    } catch (const std::exception& e) {
      r.id = id;
      r.checks.push_back({"exception", false, e.what()});
    }
    all = all && r.passed();
    std::cout << "criterion " << std::setw(2) << id << ": " << (r.passed() ? "PASS" : "FAIL") << "  " << r.title << " ["
              << std::fixed << std::setprecision(1) << r.seconds << " s]  " << r.summary() << std::endl;
  }
  return all ? 0 : 1;
}
