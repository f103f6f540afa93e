// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Experiment driver behind the brcl command line: configuration, replicate
// fan-out and result files.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "brcl/experiment.hpp"

namespace brcl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::vector<double> intensities;
  std::uint64_t replicates = 0;
  double sigma = 1.0;
  double alpha = 0.5;
  CompactInterval sigma_set = default_sigma_set();
  CompactInterval alpha_set = default_alpha_set();
  double delta = 1e-5;
  int grid = 0;
  double bandwidth = 0.0;  //!< 0 selects sigma^2 h^alpha
  std::uint64_t seed = 0;
  std::string output = "brcl-out";
  std::uint64_t pilot_reps = 1000;
  unsigned workers = 1;
  bool triplewise = true;
  std::uint64_t samples = 100000;  //!< typical-cell draws

  FieldParams params() const { return {sigma, alpha}; }
  //! Sorted key = value lines of every numeric setting; output and workers excluded.
  std::string canonical() const;
  //! FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;
};

//! Which keys a command cannot run without.
enum class Command { kSimulate, kEstimate, kTypicalCell, kVerify };

//! Parses flat `key = value` text. Unknown keys, malformed values and keys
//! missing for `cmd` raise ConfigError naming the key.
ExperimentConfig parse_config(std::istream& in, Command cmd);
ExperimentConfig load_config(const std::filesystem::path& path, Command cmd);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<unsigned> workers;
};

void apply(ExperimentConfig& cfg, const Overrides& o);

//! Runs every (N, replicate) pair not in `skip` on a pool of cfg.workers
//! threads. One design is drawn per N and shared by its replicates. `sink`
//! sees results in (N, replicate) order on the calling thread.
void run_experiment(const ExperimentConfig& cfg, const ReplicateOptions& opt,
                    const std::set<std::pair<long long, std::uint64_t>>& skip,
                    const std::function<void(const ReplicateResult&)>& sink, std::ostream* log = nullptr);

ReplicateOptions replicate_options(const ExperimentConfig& cfg);

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_estimate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_typical_cell(const ExperimentConfig& cfg, std::ostream& log);

struct VerifyOptions {
  double bvn_bias = 0.0;  //!< added to every Phi2 value in the likelihood suite
  std::optional<ExperimentConfig> config;
};

int cmd_verify(const std::string& suite, const VerifyOptions& opt, std::ostream& out);

//! Full command-line entry point.
int run(int argc, char** argv);

// CSV helpers shared with tests.
std::string csv_number(double x);
std::string csv_field(const std::string& s);
std::vector<std::string> csv_split(const std::string& line);

}  // namespace brcl::cli
