// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;
using namespace brcl::cli;

const char* kSmallConfig =
    "intensities = 64, 128\n"
    "replicates = 2\n"
    "sigma = 1\n"
    "alpha = 0.5\n"
    "delta = 1e-4\n"
    "seed = 123\n"
    "pilot_reps = 1000\n";

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("brcl-test-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  static std::vector<std::string> lines(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }
  int run_cli(std::vector<std::string> args) const {
    args.insert(args.begin(), "brcl");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run(static_cast<int>(argv.size()), argv.data());
  }
  ExperimentConfig small(const std::string& out) const {
    std::istringstream in(kSmallConfig);
    auto cfg = parse_config(in, Command::kEstimate);
    cfg.output = (dir_ / out).string();
    return cfg;
  }

  fs::path dir_;
};

std::string without_column(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string out;
  std::size_t col = std::string::npos;
  for (std::string line; std::getline(in, line);) {
    auto cells = csv_split(line);
    if (col == std::string::npos) col = static_cast<std::size_t>(std::find(cells.begin(), cells.end(), name) - cells.begin());
    cells.erase(cells.begin() + static_cast<long>(col));
    for (const auto& c : cells) out += c + ",";
    out += "\n";
  }
  return out;
}

TEST(Config, MissingRequiredKeyNamesIt) {
  std::istringstream in("intensities = 64\nreplicates = 1\nsigma = 1\nalpha = 0.5\ndelta = 1e-4\n");
  try {
    parse_config(in, Command::kEstimate);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'seed'"), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsMalformedValues) {
  auto bad = [](const std::string& extra) {
    std::istringstream in(std::string(kSmallConfig) + extra);
    return parse_config(in, Command::kEstimate);
  };
  EXPECT_THROW(bad("grid = 16\n"), ConfigError);
  EXPECT_THROW(bad("bandwidth = -1\n"), ConfigError);
  EXPECT_THROW(bad("colour = blue\n"), ConfigError);
  std::istringstream desc("intensities = 128, 64\nreplicates = 1\nsigma = 1\nalpha = 0.5\ndelta = 1e-4\nseed = 1\n");
  EXPECT_THROW(parse_config(desc, Command::kEstimate), ConfigError);
  EXPECT_NO_THROW(bad("bandwidth = auto\ngrid = 32\n"));
}

TEST(Config, HashTracksSettingsButNotOutput) {
  std::istringstream a(kSmallConfig), b(kSmallConfig);
  auto x = parse_config(a, Command::kEstimate), y = parse_config(b, Command::kEstimate);
  y.output = "elsewhere";
  y.workers = 4;
  EXPECT_EQ(x.hash(), y.hash());
  EXPECT_EQ(x.hash().size(), 16u);
  y.seed = 124;
  EXPECT_NE(x.hash(), y.hash());
}

TEST(Csv, SplitInvertsField) {
  const std::vector<std::string> cells{"plain", "with,comma", "with \"quote\"", ""};
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + csv_field(cells[i]);
  EXPECT_EQ(csv_split(line), cells);
  EXPECT_EQ(std::stod(csv_number(0.1)), 0.1);
}

TEST_F(TempDir, MissingKeyExitsWithUsageCode) {
  const auto cfg = write("bad.cfg", "intensities = 64\nreplicates = 1\n");
  EXPECT_EQ(run_cli({"estimate", "--config", cfg.string(), "--out", (dir_ / "o").string()}), kExitUsage);
  EXPECT_FALSE(fs::exists(dir_ / "o" / "results.csv"));
}

TEST_F(TempDir, UnknownSuiteExitsWithUsageCode) {
  EXPECT_EQ(run_cli({"verify", "nonsense"}), kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}), kExitUsage);
}

TEST_F(TempDir, BiasedBvnFailsLikelihoodSuite) {
  std::ostringstream out;
  VerifyOptions o;
  EXPECT_EQ(cmd_verify("likelihood", o, out), kExitOk) << out.str();
  o.bvn_bias = 1e-6;
  std::ostringstream out2;
  EXPECT_EQ(cmd_verify("likelihood", o, out2), kExitFailure) << out2.str();
}

TEST_F(TempDir, ZeroReplicatesWriteHeaderOnly) {
  auto cfg = small("zero");
  cfg.replicates = 0;
  std::ostringstream log;
  ASSERT_EQ(cmd_estimate(cfg, log), kExitOk);
  const auto l = lines(dir_ / "zero" / "results.csv");
  ASSERT_EQ(l.size(), 1u);
  EXPECT_EQ(l[0].rfind("config_hash,seed,version,N,replicate,status", 0), 0u);
}

TEST_F(TempDir, EstimateWritesOneRowPerReplicate) {
  auto cfg = small("two");
  cfg.intensities = {128};
  std::ostringstream log;
  ASSERT_EQ(cmd_estimate(cfg, log), kExitOk) << log.str();
  const auto l = lines(dir_ / "two" / "results.csv");
  ASSERT_EQ(l.size(), 3u);
  for (std::size_t i = 1; i < l.size(); ++i) {
    const auto c = csv_split(l[i]);
    EXPECT_EQ(c[0], cfg.hash());
    EXPECT_EQ(c[4], std::to_string(i - 1));
    EXPECT_EQ(c[5], "ok") << l[i];
  }
  EXPECT_TRUE(fs::exists(dir_ / "two" / "results.json"));
}

TEST_F(TempDir, RerunsAreByteIdenticalAcrossWorkerCounts) {
  auto a = small("a"), b = small("b");
  b.workers = 3;
  std::ostringstream log;
  ASSERT_EQ(cmd_estimate(a, log), kExitOk);
  ASSERT_EQ(cmd_estimate(b, log), kExitOk);
  EXPECT_EQ(without_column(slurp(dir_ / "a" / "results.csv"), "wall_time"),
            without_column(slurp(dir_ / "b" / "results.csv"), "wall_time"));
  EXPECT_EQ(slurp(dir_ / "a" / "results.json"), slurp(dir_ / "b" / "results.json"));

  auto s1 = small("s1"), s2 = small("s2");
  s2.workers = 2;
  ASSERT_EQ(cmd_simulate(s1, log), kExitOk);
  ASSERT_EQ(cmd_simulate(s2, log), kExitOk);
  EXPECT_EQ(slurp(dir_ / "s1" / "field_N128_r1.csv"), slurp(dir_ / "s2" / "field_N128_r1.csv"));
}

TEST_F(TempDir, ResumeSkipsCompletedRowsAndRepairsTornLine) {
  auto full = small("full"), part = small("part");
  std::ostringstream log;
  ASSERT_EQ(cmd_estimate(full, log), kExitOk);
  const auto ref = lines(dir_ / "full" / "results.csv");
  ASSERT_EQ(ref.size(), 5u);

  // Keep the header and two rows, plus half of the third.
  fs::create_directories(dir_ / "part");
  {
    std::ofstream out(dir_ / "part" / "results.csv", std::ios::binary);
    out << ref[0] << '\n' << ref[1] << '\n' << ref[2] << '\n' << ref[3].substr(0, ref[3].size() / 2);
  }
  std::ostringstream log2;
  ASSERT_EQ(cmd_estimate(part, log2), kExitOk);
  EXPECT_NE(log2.str().find("resuming: 2"), std::string::npos) << log2.str();
  EXPECT_EQ(without_column(slurp(dir_ / "part" / "results.csv"), "wall_time"),
            without_column(slurp(dir_ / "full" / "results.csv"), "wall_time"));

  // A finished run is left alone.
  ASSERT_EQ(cmd_estimate(part, log2), kExitOk);
  EXPECT_EQ(lines(dir_ / "part" / "results.csv").size(), 5u);
}

TEST_F(TempDir, ResumeRefusesForeignConfig) {
  auto a = small("x");
  a.intensities = {64};
  a.replicates = 1;
  std::ostringstream log;
  ASSERT_EQ(cmd_estimate(a, log), kExitOk);
  a.seed = 999;
  EXPECT_THROW(cmd_estimate(a, log), std::runtime_error);
}

TEST_F(TempDir, TypicalCellIsReproducible) {
  std::istringstream in("samples = 500\nseed = 9\n");
  auto cfg = parse_config(in, Command::kTypicalCell);
  std::ostringstream log;
  cfg.output = (dir_ / "t1").string();
  ASSERT_EQ(cmd_typical_cell(cfg, log), kExitOk);
  cfg.output = (dir_ / "t2").string();
  ASSERT_EQ(cmd_typical_cell(cfg, log), kExitOk);
  EXPECT_EQ(lines(dir_ / "t1" / "typical_cells.csv").size(), 501u);
  EXPECT_EQ(slurp(dir_ / "t1" / "typical_cells.csv"), slurp(dir_ / "t2" / "typical_cells.csv"));
}

}  // namespace
