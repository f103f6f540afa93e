// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.

#include "cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <boost/program_options.hpp>
#include <condition_variable>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <thread>

#include "verify.hpp"

namespace brcl::cli {

namespace fs = std::filesystem;
namespace po = boost::program_options;
using nlohmann::json;

// ---------------------------------------------------------------------------
// CSV.

std::string csv_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

namespace {

std::string join(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s;
}

double parse_double(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + s + "' is not a number");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw ConfigError("config key '" + key + "': '" + s + "' is not a number");
  return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("config key '" + key + "': empty list entry");
    out.push_back(parse_double(item.substr(b, e - b + 1), key));
  }
  return out;
}

CompactInterval parse_interval(const std::string& s, const std::string& key) {
  const auto v = parse_list(s, key);
  if (v.size() != 2) throw ConfigError("config key '" + key + "': expected 'lo, hi'");
  try {
    return {v[0], v[1]};
  } catch (const DomainError&) {
    throw ConfigError("config key '" + key + "': need finite lo < hi");
  }
}

std::string version_string() { return kVersion; }

}  // namespace

// ---------------------------------------------------------------------------
// Configuration.

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "alpha = " << alpha << '\n';
  os << "alpha_set = " << alpha_set.lo << ", " << alpha_set.hi << '\n';
  os << "bandwidth = " << bandwidth << '\n';
  os << "delta = " << delta << '\n';
  os << "grid = " << grid << '\n';
  os << "intensities = ";
  for (std::size_t i = 0; i < intensities.size(); ++i) os << (i ? ", " : "") << intensities[i];
  os << '\n';
  os << "pilot_reps = " << pilot_reps << '\n';
  os << "replicates = " << replicates << '\n';
  os << "samples = " << samples << '\n';
  os << "seed = " << seed << '\n';
  os << "sigma = " << sigma << '\n';
  os << "sigma_set = " << sigma_set.lo << ", " << sigma_set.hi << '\n';
  os << "triplewise = " << (triplewise ? "true" : "false") << '\n';
  return os.str();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

ExperimentConfig parse_config(std::istream& in, Command cmd) {
  po::options_description desc;
  desc.add_options()                                    //
      ("intensities", po::value<std::string>())        //
      ("replicates", po::value<std::uint64_t>())       //
      ("sigma", po::value<std::string>())              //
      ("alpha", po::value<std::string>())              //
      ("sigma_set", po::value<std::string>())          //
      ("alpha_set", po::value<std::string>())          //
      ("delta", po::value<std::string>())              //
      ("grid", po::value<int>())                       //
      ("bandwidth", po::value<std::string>())          //
      ("seed", po::value<std::uint64_t>())             //
      ("output", po::value<std::string>())             //
      ("pilot_reps", po::value<std::uint64_t>())       //
      ("workers", po::value<unsigned>())               //
      ("triplewise", po::value<bool>())                //
      ("samples", po::value<std::uint64_t>());
  po::variables_map vm;
  try {
    po::store(po::parse_config_file(in, desc, false), vm);
    po::notify(vm);
  } catch (const po::error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  std::vector<std::string> required;
  switch (cmd) {
    case Command::kSimulate:
    case Command::kEstimate:
      required = {"intensities", "replicates", "sigma", "alpha", "delta", "seed"};
      break;
    case Command::kTypicalCell:
      required = {"samples", "seed"};
      break;
    case Command::kVerify:
      break;
  }
  for (const auto& k : required)
    if (!vm.count(k)) throw ConfigError("config: missing required key '" + k + "'");

  ExperimentConfig cfg;
  auto str = [&](const char* k) { return vm[k].as<std::string>(); };
  if (vm.count("intensities")) {
    cfg.intensities = parse_list(str("intensities"), "intensities");
    for (std::size_t i = 0; i < cfg.intensities.size(); ++i) {
      if (!(cfg.intensities[i] >= 1.0) || !std::isfinite(cfg.intensities[i]))
        throw ConfigError("config key 'intensities': values must be finite and >= 1");
      if (i && !(cfg.intensities[i] > cfg.intensities[i - 1]))
        throw ConfigError("config key 'intensities': values must be strictly ascending");
    }
  }
  if (vm.count("replicates")) cfg.replicates = vm["replicates"].as<std::uint64_t>();
  if (vm.count("sigma")) cfg.sigma = parse_double(str("sigma"), "sigma");
  if (vm.count("alpha")) cfg.alpha = parse_double(str("alpha"), "alpha");
  try {
    (void)cfg.params();
  } catch (const DomainError&) {
    throw ConfigError("config keys 'sigma'/'alpha': need sigma > 0 and 0 < alpha < 2");
  }
  if (vm.count("sigma_set")) cfg.sigma_set = parse_interval(str("sigma_set"), "sigma_set");
  if (vm.count("alpha_set")) cfg.alpha_set = parse_interval(str("alpha_set"), "alpha_set");
  if (cfg.sigma_set.lo <= 0.0) throw ConfigError("config key 'sigma_set': lo must be > 0");
  if (cfg.alpha_set.lo <= 0.0 || cfg.alpha_set.hi >= 2.0) throw ConfigError("config key 'alpha_set': must lie in (0, 2)");
  if (vm.count("delta")) cfg.delta = parse_double(str("delta"), "delta");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("config key 'delta': must lie in (0, 1)");
  if (vm.count("grid")) cfg.grid = vm["grid"].as<int>();
  if (cfg.grid != 0 && cfg.grid < 32) throw ConfigError("config key 'grid': must be 0 or >= 32");
  if (vm.count("bandwidth")) {
    const auto b = str("bandwidth");
    cfg.bandwidth = b == "auto" ? 0.0 : parse_double(b, "bandwidth");
    if (!(cfg.bandwidth >= 0.0)) throw ConfigError("config key 'bandwidth': must be 'auto' or > 0");
  }
  if (vm.count("seed")) cfg.seed = vm["seed"].as<std::uint64_t>();
  if (vm.count("output")) cfg.output = str("output");
  if (vm.count("pilot_reps")) cfg.pilot_reps = vm["pilot_reps"].as<std::uint64_t>();
  if (cfg.pilot_reps < 1000) throw ConfigError("config key 'pilot_reps': must be >= 1000");
  if (vm.count("workers")) cfg.workers = vm["workers"].as<unsigned>();
  if (cfg.workers < 1) throw ConfigError("config key 'workers': must be >= 1");
  if (vm.count("triplewise")) cfg.triplewise = vm["triplewise"].as<bool>();
  if (vm.count("samples")) cfg.samples = vm["samples"].as<std::uint64_t>();
  if (cmd == Command::kTypicalCell && cfg.samples < 1) throw ConfigError("config key 'samples': must be >= 1");
  return cfg;
}

ExperimentConfig load_config(const fs::path& path, Command cmd) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return parse_config(in, cmd);
}

void apply(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.output) cfg.output = *o.output;
  if (o.workers) {
    if (*o.workers < 1) throw ConfigError("--workers must be >= 1");
    cfg.workers = *o.workers;
  }
}

namespace {

json config_json(const ExperimentConfig& cfg) {
  return json{{"intensities", cfg.intensities},
              {"replicates", cfg.replicates},
              {"sigma", cfg.sigma},
              {"alpha", cfg.alpha},
              {"sigma_set", {cfg.sigma_set.lo, cfg.sigma_set.hi}},
              {"alpha_set", {cfg.alpha_set.lo, cfg.alpha_set.hi}},
              {"delta", cfg.delta},
              {"grid", cfg.grid},
              {"bandwidth", cfg.bandwidth},
              {"seed", cfg.seed},
              {"pilot_reps", cfg.pilot_reps},
              {"triplewise", cfg.triplewise},
              {"samples", cfg.samples}};
}

json meta_json(const ExperimentConfig& cfg, const std::string& command) {
  return json{{"command", command}, {"version", version_string()}, {"config_hash", cfg.hash()},
              {"seed", cfg.seed},   {"config", config_json(cfg)}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<std::string> meta_cells(const ExperimentConfig& cfg) {
  return {cfg.hash(), std::to_string(cfg.seed), version_string()};
}

struct DesignBundle {
  SiteDesign design;
  std::unique_ptr<DesignSimulator> sim;
};

DesignBundle build_bundle(const ExperimentConfig& cfg, double n) {
  DesignBundle b;
  Rng drng = replicate_stream(cfg.seed, n, 0, StreamPurpose::kDesign);
  b.design = make_design(n, cfg.grid, drng);
  BrownResnickOptions bo;
  bo.delta = cfg.delta;
  bo.pilot_reps = cfg.pilot_reps;
  Rng pilot = replicate_stream(cfg.seed, n, 0, StreamPurpose::kPilot);
  b.sim = std::make_unique<DesignSimulator>(b.design, cfg.params(), bo, pilot);
  return b;
}

}  // namespace

ReplicateOptions replicate_options(const ExperimentConfig& cfg) {
  ReplicateOptions o;
  o.params = cfg.params();
  o.sigma_set = cfg.sigma_set;
  o.alpha_set = cfg.alpha_set;
  o.bandwidth = cfg.bandwidth;
  o.triplewise = cfg.triplewise;
  return o;
}

// ---------------------------------------------------------------------------
// Experiment runner.

void run_experiment(const ExperimentConfig& cfg, const ReplicateOptions& opt,
                    const std::set<std::pair<long long, std::uint64_t>>& skip,
                    const std::function<void(const ReplicateResult&)>& sink, std::ostream* log) {
  for (double n : cfg.intensities) {
    std::vector<std::uint64_t> jobs;
    for (std::uint64_t r = 0; r < cfg.replicates; ++r)
      if (!skip.count({std::llround(n), r})) jobs.push_back(r);
    if (jobs.empty()) continue;
    if (log) *log << "N = " << n << ": building design\n" << std::flush;
    const DesignBundle b = build_bundle(cfg, n);
    if (log)
      *log << "N = " << n << ": " << b.design.used.size() << " sites, |E_N| = " << b.design.edges.size()
           << ", |DT_N| = " << b.design.triangles.size() << ", " << jobs.size() << " replicates\n"
           << std::flush;

    std::vector<std::optional<ReplicateResult>> slots(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex m;
    std::condition_variable cv;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next++;
        if (i >= jobs.size()) return;
        ReplicateResult res = run_replicate(b.design, *b.sim, cfg.seed, jobs[i], opt);
        {
          std::lock_guard lock(m);
          slots[i] = std::move(res);
        }
        cv.notify_all();
      }
    };
    std::vector<std::thread> pool;
    const std::size_t nthreads = std::min<std::size_t>(cfg.workers, jobs.size());
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      ReplicateResult res;
      {
        std::unique_lock lock(m);
        cv.wait(lock, [&] { return slots[i].has_value(); });
        res = std::move(*slots[i]);
        slots[i].reset();
      }
      sink(res);
    }
    for (auto& t : pool) t.join();
  }
}

// ---------------------------------------------------------------------------
// simulate.

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir(cfg.output);
  fs::create_directories(dir);
  const auto meta = meta_cells(cfg);
  json files = json::array();
  for (double n : cfg.intensities) {
    const DesignBundle b = build_bundle(cfg, n);
    for (std::uint64_t r = 0; r < cfg.replicates; ++r) {
      Rng rng = replicate_stream(cfg.seed, n, r, StreamPurpose::kField);
      const Realization real = b.sim->simulate(rng);
      std::ostringstream name;
      name << "field_N" << std::llround(n) << "_r" << r << ".csv";
      std::ofstream out(dir / name.str());
      out << "config_hash,seed,version,N,replicate,vertex,x,y,in_cell,eta,argmax\n";
      for (std::size_t c = 0; c < b.design.used.size(); ++c) {
        const int v = b.design.used[c];
        const Point& p = b.design.tri.vertices[static_cast<std::size_t>(v)];
        auto cells = meta;
        cells.insert(cells.end(), {csv_number(n), std::to_string(r), std::to_string(v), csv_number(p.x), csv_number(p.y),
                                   in_unit_cell(p) ? "1" : "0", csv_number(real.eta[static_cast<std::size_t>(v)]),
                                   std::to_string(real.sample.record.argmax[c])});
        out << join(cells) << '\n';
      }
      if (!out) throw std::runtime_error("cannot write " + (dir / name.str()).string());
      files.push_back(name.str());
      log << "wrote " << (dir / name.str()).string() << '\n';
    }
  }
  json j = meta_json(cfg, "simulate");
  j["files"] = files;
  write_json(dir / "simulate.json", j);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// estimate.

namespace {

const std::vector<std::string> kResultHeader = {
    "config_hash", "seed",  "version",    "N",     "replicate", "status",   "sigma2_2", "sigma2_3", "alpha_2",
    "alpha_3",     "v2",    "v3",         "local_time", "edges", "triangles", "retained", "wall_time", "error"};

std::string result_line(const ExperimentConfig& cfg, const ReplicateResult& r) {
  auto cells = meta_cells(cfg);
  cells.insert(cells.end(), {csv_number(r.intensity), std::to_string(r.replicate), r.error.empty() ? "ok" : "error",
                             csv_number(r.sigma2_2), csv_number(r.sigma2_3), csv_number(r.alpha_2),
                             csv_number(r.alpha_3), csv_number(r.v2), csv_number(r.v3), csv_number(r.local_time),
                             std::to_string(r.edges), std::to_string(r.triangles), std::to_string(r.retained),
                             csv_number(r.wall_time), csv_field(r.error)});
  return join(cells);
}

ReplicateResult parse_result(const std::vector<std::string>& c) {
  auto num = [](const std::string& s) { return s == "nan" ? ReplicateResult::kNaN : std::stod(s); };
  ReplicateResult r;
  r.intensity = num(c[3]);
  r.replicate = std::stoull(c[4]);
  r.sigma2_2 = num(c[6]);
  r.sigma2_3 = num(c[7]);
  r.alpha_2 = num(c[8]);
  r.alpha_3 = num(c[9]);
  r.v2 = num(c[10]);
  r.v3 = num(c[11]);
  r.local_time = num(c[12]);
  r.edges = std::stoull(c[13]);
  r.triangles = std::stoull(c[14]);
  r.retained = std::stoull(c[15]);
  r.wall_time = num(c[16]);
  r.error = c[17];
  if (c[5] != "ok" && r.error.empty()) r.error = "error";
  return r;
}

//! Completed rows of an existing results file; a torn last line is cut off.
std::vector<ReplicateResult> read_results(const fs::path& path, const ExperimentConfig& cfg) {
  std::vector<ReplicateResult> rows;
  if (!fs::exists(path)) return rows;
  std::string text;
  {
    std::ifstream in(path, std::ios::binary);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto last_nl = text.rfind('\n');
  const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
  if (keep != text.size()) fs::resize_file(path, keep);
  std::istringstream in(text.substr(0, keep));
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line != join(kResultHeader)) throw std::runtime_error(path.string() + ": unexpected header, refusing to append");
  while (std::getline(in, line)) {
    const auto c = csv_split(line);
    if (c.size() != kResultHeader.size()) throw std::runtime_error(path.string() + ": malformed row");
    if (c[0] != cfg.hash()) throw std::runtime_error(path.string() + ": written with a different config (hash " + c[0] + ")");
    rows.push_back(parse_result(c));
  }
  return rows;
}

json summary_json(const std::vector<ReplicateResult>& rows, const ExperimentConfig& cfg) {
  json j;
  const auto t1 = summarize_growth(rows, cfg.alpha);
  json l1 = json::array();
  for (const auto& lv : t1.levels)
    l1.push_back({{"N", lv.intensity},
                  {"replicates", lv.replicates},
                  {"median_abs_v2", lv.median_abs_v2},
                  {"median_abs_v3", lv.median_abs_v3},
                  {"c_v2", lv.c_v2},
                  {"c_v3", lv.c_v3},
                  {"r2_v2", lv.r2_v2},
                  {"r2_v3", lv.r2_v3},
                  {"corr_v2_v3", lv.corr_v2_v3},
                  {"ratio_dispersion", lv.ratio_dispersion},
                  {"negative_fraction", lv.negative_fraction}});
  j["growth"] = {{"levels", l1},
                   {"v2_growth_slope", t1.v2_growth_slope},
                   {"v3_growth_slope", t1.v3_growth_slope},
                   {"pooled_c_v2", t1.pooled_c_v2},
                   {"pooled_c_v3", t1.pooled_c_v3}};
  const auto t2 = summarize_rates(rows, cfg.params());
  json l2 = json::array();
  for (const auto& lv : t2.levels)
    l2.push_back({{"N", lv.intensity},
                  {"replicates", lv.replicates},
                  {"median_sigma2_error", lv.median_sigma_error},
                  {"median_alpha_error_logn", lv.median_alpha_error_logn},
                  {"sigma2_exceed_fraction", lv.sigma_exceed_fraction},
                  {"opposite_sign_fraction", lv.opposite_sign_fraction},
                  {"corr_pair_triple", lv.corr_pair_triple}});
  j["rates"] = {{"levels", l2}, {"sigma2_rate_slope", t2.sigma_rate_slope}, {"alpha_rate_slope", t2.alpha_rate_slope}};
  return j;
}

}  // namespace

int cmd_estimate(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir(cfg.output);
  fs::create_directories(dir);
  const fs::path csv = dir / "results.csv";
  const auto done = read_results(csv, cfg);
  std::set<std::pair<long long, std::uint64_t>> skip;
  for (const auto& r : done) skip.insert({std::llround(r.intensity), r.replicate});
  if (!done.empty()) log << "resuming: " << done.size() << " replicates already in " << csv.string() << '\n';

  {
    std::ofstream out(csv, std::ios::app);
    if (done.empty() && fs::file_size(csv) == 0) out << join(kResultHeader) << '\n';
    out.flush();
    run_experiment(
        cfg, replicate_options(cfg), skip,
        [&](const ReplicateResult& r) {
          out << result_line(cfg, r) << '\n';
          out.flush();
          log << "N = " << r.intensity << " replicate " << r.replicate << (r.error.empty() ? " ok" : " error: " + r.error)
              << '\n';
        },
        &log);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
  }

  auto rows = read_results(csv, cfg);
  std::sort(rows.begin(), rows.end(), [](const ReplicateResult& a, const ReplicateResult& b) {
    return std::pair(a.intensity, a.replicate) < std::pair(b.intensity, b.replicate);
  });
  std::size_t errors = 0;
  for (const auto& r : rows) errors += !r.error.empty();
  json j = meta_json(cfg, "estimate");
  j["rows"] = rows.size();
  j["errors"] = errors;
  j["summary"] = summary_json(rows, cfg);
  write_json(dir / "results.json", j);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// typical-cell.

int cmd_typical_cell(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir(cfg.output);
  fs::create_directories(dir);
  Rng rng = make_stream(cfg.seed, 0, StreamPurpose::kTypicalCell);
  TypicalCellSampler sampler;
  std::vector<double> area, length;
  std::ofstream out(dir / "typical_cells.csv");
  out << "config_hash,seed,version,index,radius,area,edge_length\n";
  const auto meta = meta_cells(cfg);
  for (std::uint64_t i = 0; i < cfg.samples; ++i) {
    const auto c = sampler.sample(rng);
    area.push_back(c.area());
    length.push_back(distance(c.vertices[0], c.vertices[1]));
    auto cells = meta;
    cells.insert(cells.end(), {std::to_string(i), csv_number(c.radius), csv_number(area.back()), csv_number(length.back())});
    out << join(cells) << '\n';
  }
  if (!out) throw std::runtime_error("cannot write typical_cells.csv");
  const auto ks = stats::ks_test(length, [](double l) { return typical_edge_cdf(l); });
  json j = meta_json(cfg, "typical-cell");
  j["samples"] = cfg.samples;
  j["mean_area"] = stats::mean(area);
  j["acceptance_rate"] = sampler.acceptance_rate();
  j["edge_length_ks"] = {{"statistic", ks.statistic}, {"p_value", ks.p_value}};
  write_json(dir / "typical_cell.json", j);
  log << "mean area " << stats::mean(area) << ", edge-length KS p = " << ks.p_value << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify.

int cmd_verify(const std::string& suite, const VerifyOptions& opt, std::ostream& out) {
  verify::Scale scale;
  if (opt.config) {
    const auto& c = *opt.config;
    if (!c.intensities.empty()) scale.growth_intensities = scale.rate_intensities = c.intensities;
    if (c.replicates > 0) scale.growth_replicates = scale.rate_replicates = c.replicates;
    if (c.grid > 0) scale.growth_grid = c.grid;
    scale.workers = c.workers;
    scale.seed = c.seed;
  }
  std::vector<std::function<verify::CriterionResult()>> battery;
  if (suite == "numerics") {
    battery = {verify::numerics_battery, verify::criterion1};
  } else if (suite == "geometry") {
    battery = {verify::criterion2, verify::criterion3};
  } else if (suite == "likelihood") {
    battery = {[&] { return verify::likelihood_oracles(opt.bvn_bias); }, [&] { return verify::criterion4(opt.bvn_bias); }};
  } else if (suite == "asymptotics") {
    battery = {verify::criterion5, verify::criterion6, verify::criterion7, [&] { return verify::criterion8(scale); }};
  } else if (suite == "rates") {
    battery = {[&] { return verify::criterion9(scale); }};
  } else {
    out << "unknown suite '" << suite << "' (expected numerics, geometry, likelihood, asymptotics, rates)\n";
    return kExitUsage;
  }
  bool ok = true;
  out << "suite " << suite << '\n';
  for (const auto& run_one : battery) {
    const auto res = run_one();
    for (const auto& c : res.checks) {
      out << "  " << std::left << std::setw(44) << c.name << (c.passed ? "PASS  " : "FAIL  ") << c.detail << '\n';
      ok = ok && c.passed;
    }
  }
  out << (ok ? "all checks passed\n" : "some checks failed\n");
  return ok ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// Entry point.

int run(int argc, char** argv) {
  CLI::App app{"Brown-Resnick composite likelihood on Poisson-Delaunay sites"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::uint64_t seed = 0;
  std::string out_dir;
  unsigned workers = 1;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config_path, "flat key = value configuration file");
    if (config_required) c->required();
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* simulate = app.add_subcommand("simulate", "simulate fields on Poisson-Delaunay sites");
  add_common(simulate, true);
  auto* estimate = app.add_subcommand("estimate", "simulate and estimate per replicate");
  add_common(estimate, true);
  auto* typical = app.add_subcommand("typical-cell", "sample typical Poisson-Delaunay cells");
  add_common(typical, true);
  auto* ver = app.add_subcommand("verify", "run an acceptance battery");
  add_common(ver, false);
  std::string suite;
  double bvn_bias = 0.0;
  ver->add_option("suite", suite, "numerics, geometry, likelihood, asymptotics or rates")->required();
  ver->add_option("--bvn-bias", bvn_bias, "constant added to Phi2 in the likelihood suite (mutation check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto collect = [&](CLI::App* sub) {
    if (sub->count("--seed")) ov.seed = seed;
    if (sub->count("--out")) ov.output = out_dir;
    if (sub->count("--workers")) ov.workers = workers;
  };

  try {
    if (simulate->parsed() || estimate->parsed() || typical->parsed()) {
      CLI::App* sub = simulate->parsed() ? simulate : estimate->parsed() ? estimate : typical;
      const Command cmd = simulate->parsed() ? Command::kSimulate
                          : estimate->parsed() ? Command::kEstimate
                                               : Command::kTypicalCell;
      collect(sub);
      ExperimentConfig cfg = load_config(config_path, cmd);
      apply(cfg, ov);
      if (cmd == Command::kSimulate) return cmd_simulate(cfg, std::cerr);
      if (cmd == Command::kEstimate) return cmd_estimate(cfg, std::cerr);
      return cmd_typical_cell(cfg, std::cerr);
    }
    collect(ver);
    VerifyOptions vo;
    vo.bvn_bias = bvn_bias;
    if (!config_path.empty() || ov.seed || ov.workers) {
      ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path, Command::kVerify);
      if (config_path.empty()) cfg.seed = verify::Scale{}.seed;
      apply(cfg, ov);
      vo.config = cfg;
    }
    return cmd_verify(suite, vo, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace brcl::cli
