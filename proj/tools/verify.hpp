// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Acceptance batteries, shared by `brcl verify` and the acceptance binary.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "brcl/gaussian.hpp"

namespace brcl::verify {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const;
  std::string summary() const;
};

//! Gaussian kernels with a constant added to Phi2, for mutation checks.
struct BiasedBvnKernels : GaussianKernels {
  static inline double bias = 0.0;
  static double bvn_cdf(double h, double k, Correlation r) { return brcl::bvn_cdf(h, k, r) + bias; }
};

struct Scale {
  std::vector<double> growth_intensities{1024, 4096, 16384};
  std::uint64_t growth_replicates = 100;
  int growth_grid = 32;
  std::vector<double> rate_intensities{256, 1024, 4096};
  std::uint64_t rate_replicates = 100;
  unsigned workers = 1;
  std::uint64_t seed = 20260101;
};

CriterionResult criterion1();
CriterionResult criterion2();
CriterionResult criterion3();
CriterionResult criterion4(double bvn_bias = 0.0);
CriterionResult criterion5();
CriterionResult criterion6();
CriterionResult criterion7();
CriterionResult criterion8(const Scale& scale = {});
CriterionResult criterion9(const Scale& scale = {});
CriterionResult criterion10(const std::filesystem::path& workdir);

//! Kernel oracle checks used by the numerics and likelihood suites.
CriterionResult numerics_battery();
CriterionResult likelihood_oracles(double bvn_bias = 0.0);

CriterionResult run_criterion(int id, const Scale& scale = {});

}  // namespace brcl::verify
