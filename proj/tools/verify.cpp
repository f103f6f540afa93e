// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.

#include "verify.hpp"

#include <boost/math/special_functions/owens_t.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "brcl/asymptotics.hpp"
#include "brcl/experiment.hpp"
#include "brcl/geometry.hpp"
#include "brcl/likelihood.hpp"
#include "brcl/stats.hpp"
#include "cli.hpp"

namespace brcl::verify {

namespace fs = std::filesystem;

bool CriterionResult::passed() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string CriterionResult::summary() const {
  std::string s;
  for (const auto& c : checks) s += (s.empty() ? "" : "; ") + c.name + (c.passed ? " ok" : " FAILED") + " (" + c.detail + ")";
  return s;
}

namespace {

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <class... Args>
std::string fmt(Args&&... args) {
  std::ostringstream os;
  os << std::setprecision(6);
  (os << ... << args);
  return os.str();
}

Check runtime_check(double seconds, double limit) {
  return {"runtime", seconds < limit, fmt(seconds < limit ? "within " : "over ", limit, " s")};
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

// Central differences with one Richardson step.
template <class F>
double fd1(F&& f, double x, double rel) {
  auto d = [&](double h) { return (f(x + h) - f(x - h)) / (2 * h); };
  const double h = rel * std::max(1.0, std::abs(x));
  return (4 * d(h / 2) - d(h)) / 3;
}

template <class F>
double fd2(F&& f, double x, double y, double rel) {
  auto d = [&](double hx, double hy) {
    return (f(x + hx, y + hy) - f(x + hx, y - hy) - f(x - hx, y + hy) + f(x - hx, y - hy)) / (4 * hx * hy);
  };
  return (4 * d(rel * x / 2, rel * y / 2) - d(rel * x, rel * y)) / 3;
}

template <class F>
double fd3(F&& f, double x, double y, double z, double rel) {
  auto d = [&](double hx, double hy, double hz) {
    double s = 0;
    for (int i = -1; i <= 1; i += 2)
      for (int j = -1; j <= 1; j += 2)
        for (int k = -1; k <= 1; k += 2) s += i * j * k * f(x + i * hx, y + j * hy, z + k * hz);
    return s / (8 * hx * hy * hz);
  };
  return (4 * d(rel * x / 2, rel * y / 2, rel * z / 2) - d(rel * x, rel * y, rel * z)) / 3;
}

TripleGeometry random_triangle(Rng& rng, double scale, const FieldParams& p) {
  for (;;) {
    const Point a{0, 0};
    const Point b{scale * (0.5 + uniform_open(rng)), 0};
    const Point c{scale * (uniform_open(rng) - 0.2), scale * (0.3 + uniform_open(rng))};
    const TripleGeometry g(a, b, c, p);
    if (!g.is_degenerate()) return g;
  }
}

// Phi2 through Owen's T function.
double bvn_owen(double h, double k, double r) {
  using boost::math::owens_t;
  if (h == 0.0 && k == 0.0) return 0.25 + std::asin(r) / (2.0 * kPi);
  const double s = std::sqrt(1.0 - r * r);
  auto t_term = [&](double a, double b) {
    if (a == 0.0) return b > 0 ? 0.25 : -0.25;
    return owens_t(a, (b - r * a) / (a * s));
  };
  const double beta = (h * k < 0.0 || (h * k == 0.0 && h + k < 0.0)) ? 0.5 : 0.0;
  return 0.5 * (std_normal_cdf(h) + std_normal_cdf(k)) - t_term(h, k) - t_term(k, h) - beta;
}

// Triple exponent written from the site-by-site formula with Owen's T.
double triple_exponent_oracle(double z1, double z2, double z3, double d12, double d13, double d23,
                              const FieldParams& p) {
  const double al = p.alpha();
  const double a12 = p.increment_scale(d12), a13 = p.increment_scale(d13), a23 = p.increment_scale(d23);
  auto corr = [&](double dij, double dik, double djk) {
    return (std::pow(dij, al) + std::pow(dik, al) - std::pow(djk, al)) / (2.0 * std::pow(dij * dik, al / 2.0));
  };
  auto v = [](double a, double zi, double zj) { return a / 2.0 + std::log(zj / zi) / a; };
  return bvn_owen(v(a12, z1, z2), v(a13, z1, z3), corr(d12, d13, d23)) / z1 +
         bvn_owen(v(a12, z2, z1), v(a23, z2, z3), corr(d12, d23, d13)) / z2 +
         bvn_owen(v(a13, z3, z1), v(a23, z3, z2), corr(d13, d23, d12)) / z3;
}

}  // namespace

// ---------------------------------------------------------------------------

CriterionResult numerics_battery() {
  Timer t;
  CriterionResult res{0, "Gaussian kernels against independent oracles", {}, 0};
  double worst = 0.0;
  Rng rng(5);
  for (int i = 0; i < 400; ++i) {
    const double h = 4.0 * standard_normal(rng) / 2.0, k = 4.0 * standard_normal(rng) / 2.0;
    const double r = 1.98 * uniform_open(rng) - 0.99;
    worst = std::max(worst, std::abs(bvn_cdf(h, k, Correlation(r)) - bvn_owen(h, k, r)));
  }
  res.checks.push_back({"bvn_cdf vs Owen's T", worst <= 1e-12, fmt("max abs error ", worst)});
  res.checks.push_back({"bvn_cdf(0, 0, 0.5)", std::abs(bvn_cdf(0, 0, Correlation(0.5)) - 1.0 / 3.0) <= 1e-12,
                        fmt(bvn_cdf(0, 0, Correlation(0.5)))});
  double refl = 0.0;
  for (double h : {-2.0, -0.5, 0.3, 1.7})
    for (double k : {-1.0, 0.0, 2.2})
      for (double r : {-0.8, -0.1, 0.4, 0.95})
        refl = std::max(refl, std::abs(bvn_cdf(h, k, Correlation(r)) + bvn_cdf(-h, k, Correlation(-r)) - std_normal_cdf(k)));
  res.checks.push_back({"bvn_cdf reflection identity", refl <= 1e-10, fmt("max residual ", refl)});
  double sym = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.01) sym = std::max(sym, std::abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0));
  res.checks.push_back({"Phi(x) + Phi(-x) = 1", sym <= 1e-15, fmt("max residual ", sym)});
  res.checks.push_back({"Phi(1.959963984540054) = 0.975", std::abs(std_normal_cdf(1.959963984540054) - 0.975) <= 1e-15,
                        fmt(std::setprecision(17), std_normal_cdf(1.959963984540054))});
  res.seconds = t.seconds();
  return res;
}

CriterionResult criterion1() {
  Timer t;
  CriterionResult res{1, "psi constant", {}, 0};
  const double psi = psi_constant();
  res.seconds = t.seconds();
  res.checks.push_back({"psi = -0.094 +- 0.001", std::abs(psi + 0.094) <= 0.001, fmt(std::setprecision(10), "psi = ", psi)});
  res.checks.push_back(runtime_check(res.seconds, 1.0));
  return res;
}

CriterionResult criterion2() {
  Timer t;
  CriterionResult res{2, "Poisson-Delaunay intensities", {}, 0};
  const double n = 2000;
  std::vector<double> tri, edge;
  for (std::uint64_t r = 0; r < 50; ++r) {
    Rng rng = make_stream(2, r, StreamPurpose::kSites);
    const auto pat = sample_poisson(n, default_margin(n), rng);
    const auto dt = delaunay(pat);
    tri.push_back(static_cast<double>(triangle_set(dt).size()) / n);
    edge.push_back(static_cast<double>(edge_set(dt).size()) / n);
  }
  const double mt = stats::mean(tri), me = stats::mean(edge);
  res.checks.push_back({"mean |DT_N|/N in [1.94, 2.06]", mt >= 1.94 && mt <= 2.06, fmt(mt)});
  res.checks.push_back({"mean |E_N|/N within 3% of 3", std::abs(me / 3.0 - 1.0) <= 0.03, fmt(me)});
  res.seconds = t.seconds();
  res.checks.push_back(runtime_check(res.seconds, 60.0));
  return res;
}

CriterionResult criterion3() {
  Timer t;
  CriterionResult res{3, "typical cell and typical edge", {}, 0};
  Rng rng = make_stream(3, 0, StreamPurpose::kTypicalCell);
  TypicalCellSampler s;
  std::vector<double> area, len;
  for (int i = 0; i < 100000; ++i) {
    const auto c = s.sample(rng);
    area.push_back(c.area());
    len.push_back(distance(c.vertices[0], c.vertices[1]));
  }
  const double ma = stats::mean(area);
  res.checks.push_back({"mean cell area 0.5 +- 0.01", std::abs(ma - 0.5) <= 0.01, fmt(ma)});
  const auto ks = stats::ks_test(len, [](double l) { return typical_edge_cdf(l); });
  res.checks.push_back({"edge length KS vs typical_edge_cdf", ks.p_value > 0.01, fmt("D = ", ks.statistic, ", p = ", ks.p_value)});
  res.seconds = t.seconds();
  res.checks.push_back(runtime_check(res.seconds, 60.0));
  return res;
}

CriterionResult criterion4(double bvn_bias) {
  using K = BiasedBvnKernels;
  K::bias = bvn_bias;
  Timer t;
  CriterionResult res{4, "density oracles", {}, 0};
  Rng rng = make_stream(4, 0, StreamPurpose::kMisc);
  double pair_worst = 0.0, triple_worst = 0.0, partial_worst = 0.0;
  const FieldParams p(1.0, 0.6);
  for (int i = 0; i < 20; ++i) {
    const double z1 = std::exp(0.6 * standard_normal(rng)), z2 = std::exp(0.6 * standard_normal(rng)),
                 z3 = std::exp(0.6 * standard_normal(rng));
    const auto pg = PairGeometry::from_scale(0.2 + 1.5 * uniform_open(rng));
    auto G2 = [&](double x, double y) { return std::exp(-pair_exponent<K>(x, y, pg)); };
    pair_worst = std::max(pair_worst, rel_err(pair_density<K>(z1, z2, pg), fd2(G2, z1, z2, 1e-3)));

    const auto g = random_triangle(rng, 0.6, p);
    auto V = [&](double x, double y, double z) { return triple_exponent<K>(x, y, z, g); };
    auto G3 = [&](double x, double y, double z) { return std::exp(-V(x, y, z)); };
    triple_worst = std::max(triple_worst, rel_err(triple_density<K>(z1, z2, z3, g), fd3(G3, z1, z2, z3, 1e-2)));

    const auto P = triple_exponent_partials<K>(z1, z2, z3, g);
    const double fd[7] = {fd1([&](double x) { return V(x, z2, z3); }, z1, 1e-4),
                          fd1([&](double x) { return V(z1, x, z3); }, z2, 1e-4),
                          fd1([&](double x) { return V(z1, z2, x); }, z3, 1e-4),
                          fd2([&](double x, double y) { return V(x, y, z3); }, z1, z2, 1e-3),
                          fd2([&](double x, double y) { return V(x, z2, y); }, z1, z3, 1e-3),
                          fd2([&](double x, double y) { return V(z1, x, y); }, z2, z3, 1e-3),
                          fd3(V, z1, z2, z3, 1e-2)};
    const double an[7] = {P.first[0], P.first[1], P.first[2], P.v12, P.v13, P.v23, P.v123};
    for (int j = 0; j < 7; ++j) partial_worst = std::max(partial_worst, rel_err(an[j], fd[j]));
  }
  K::bias = 0.0;
  res.checks.push_back({"pair_density vs FD of exp(-V)", pair_worst <= 1e-4, fmt("max rel error ", pair_worst)});
  res.checks.push_back({"triple_density vs FD of exp(-V)", triple_worst <= 1e-4, fmt("max rel error ", triple_worst)});
  res.checks.push_back({"triple_exponent_partials vs FD", partial_worst <= 1e-5, fmt("max rel error ", partial_worst)});
  res.seconds = t.seconds();
  res.checks.push_back(runtime_check(res.seconds, 10.0));
  return res;
}

CriterionResult likelihood_oracles(double bvn_bias) {
  using K = BiasedBvnKernels;
  K::bias = bvn_bias;
  Timer t;
  CriterionResult res{0, "likelihood against independent formulas", {}, 0};
  Rng rng = make_stream(40, 0, StreamPurpose::kMisc);
  double v_worst = 0.0, dens_worst = 0.0, marg_worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const FieldParams p(0.5 + uniform_open(rng), 0.2 + 1.6 * uniform_open(rng));
    const auto g = random_triangle(rng, 0.8, p);
    const double z1 = std::exp(0.8 * standard_normal(rng)), z2 = std::exp(0.8 * standard_normal(rng)),
                 z3 = std::exp(0.8 * standard_normal(rng));
    const double oracle = triple_exponent_oracle(z1, z2, z3, g.d12, g.d13, g.d23, p);
    v_worst = std::max(v_worst, rel_err(triple_exponent<K>(z1, z2, z3, g), oracle));
    auto G3 = [&](double x, double y, double z) { return std::exp(-triple_exponent_oracle(x, y, z, g.d12, g.d13, g.d23, p)); };
    dens_worst = std::max(dens_worst, rel_err(triple_density<K>(z1, z2, z3, g), fd3(G3, z1, z2, z3, 1e-2)));
    // Sending z3 to infinity leaves the pair exponent.
    const PairGeometry pg(g.d12, p);
    marg_worst = std::max(marg_worst, rel_err(triple_exponent<K>(z1, z2, 1e300, g), pair_exponent<K>(z1, z2, pg)));
  }
  K::bias = 0.0;
  res.checks.push_back({"triple_exponent vs Owen's T formula", v_worst <= 1e-10, fmt("max rel error ", v_worst)});
  res.checks.push_back({"triple_density vs FD of oracle", dens_worst <= 1e-4, fmt("max rel error ", dens_worst)});
  res.checks.push_back({"triple -> pair as z3 -> inf", marg_worst <= 1e-12, fmt("max rel error ", marg_worst)});
  res.seconds = t.seconds();
  return res;
}

CriterionResult criterion5() {
  Timer t;
  CriterionResult res{5, "increment limit laws", {}, 0};
  const FieldParams p(1.0, 0.5);
  const int n = 10000;
  const double d = 1e-3;
  {
    const Point x1{0.1, 0.1}, x2{0.1 + d, 0.1};
    Rng pilot = make_stream(5, 0, StreamPurpose::kPilot);
    BrownResnickSampler sampler(EvalPoints({x1, x2}), p, {}, pilot);
    Rng rng = make_stream(5, 0, StreamPurpose::kField);
    std::vector<double> u;
    for (int i = 0; i < n; ++i) {
      const auto s = sampler.sample(rng);
      u.push_back(normalized_increment(s.eta(0), s.eta(1), d, p));
    }
    const auto ks = stats::ks_test(u, [](double x) { return std_normal_cdf(x); });
    res.checks.push_back({"pair U ~ N(0,1), KS at 0.01", ks.p_value > 0.01, fmt("D = ", ks.statistic, ", p = ", ks.p_value)});
  }
  {
    const double d12 = 1.0, d13 = 1.2, d23 = 0.9;
    const double cx = (d13 * d13 - d23 * d23 + d12 * d12) / (2 * d12), cy = std::sqrt(d13 * d13 - cx * cx);
    const Point x1{0.1, 0.1}, x2{0.1 + d * d12, 0.1}, x3{0.1 + d * cx, 0.1 + d * cy};
    Rng pilot = make_stream(5, 1, StreamPurpose::kPilot);
    BrownResnickSampler sampler(EvalPoints({x1, x2, x3}), p, {}, pilot);
    Rng rng = make_stream(5, 1, StreamPurpose::kField);
    int both = 0;
    for (int i = 0; i < n; ++i) {
      const auto s = sampler.sample(rng);
      const double u2 = normalized_increment(s.eta(0), s.eta(1), distance(x1, x2), p);
      const double u3 = normalized_increment(s.eta(0), s.eta(2), distance(x1, x3), p);
      both += u2 <= 0.0 && u3 <= 0.0;
    }
    const double al = p.alpha();
    const double r = (std::pow(d12, al) + std::pow(d13, al) - std::pow(d23, al)) / (2 * std::pow(d12 * d13, al / 2));
    const double want = 0.25 + std::asin(r) / (2 * kPi);
    const double got = static_cast<double>(both) / n, se = std::sqrt(want * (1 - want) / n);
    res.checks.push_back({"triple quadrant P[U2<=0, U3<=0] at 3 SE", std::abs(got - want) <= 3 * se,
                          fmt("MC ", got, ", limit ", want, ", SE ", se)});
  }
  res.seconds = t.seconds();
  res.checks.push_back(runtime_check(res.seconds, 600.0));
  return res;
}

CriterionResult criterion6() {
  Timer t;
  CriterionResult res{6, "score limits at d = 1e-4", {}, 0};
  Rng rng = make_stream(6, 0, StreamPurpose::kMisc);
  const double sigma = 1.0, alpha = 0.5, d = 1e-4;
  double pair_s = 0.0, pair_a = 0.0, tri_s = 0.0, tri_a = 0.0;
  for (int i = 0; i < 10; ++i) {
    // z1 from the unit Frechet law, u standard normal.
    const double z1 = 1.0 / standard_exponential(rng);
    {
      const double u = standard_normal(rng);
      const double a = sigma * std::pow(d, alpha / 2), z2 = z1 * std::exp(a * u);
      auto L = [&](double s, double al) { return pair_log_density(z1, z2, PairGeometry(d, FieldParams(s, al))); };
      const auto lim = pair_score_limit(u, sigma);
      pair_s = std::max(pair_s, std::abs(fd1([&](double s) { return L(s, alpha); }, sigma, 1e-5) - lim.d_sigma));
      pair_a = std::max(pair_a, std::abs(fd1([&](double al) { return L(sigma, al); }, alpha, 1e-5) / std::log(d) -
                                         lim.d_alpha_scaled));
    }
    {
      const auto shape = random_triangle(rng, 1.0, FieldParams(sigma, alpha));
      const double u2 = standard_normal(rng), u3 = standard_normal(rng);
      auto geom = [&](double s, double al) {
        return TripleGeometry(d * shape.d12, d * shape.d13, d * shape.d23, FieldParams(s, al));
      };
      const auto g0 = geom(sigma, alpha);
      const double z2 = z1 * std::exp(g0.a12 * u2), z3 = z1 * std::exp(g0.a13 * u3);
      auto L = [&](double s, double al) { return triple_log_density(z1, z2, z3, geom(s, al)); };
      const auto lim = triple_score_limit(u2, u3, shape.r1, sigma);
      tri_s = std::max(tri_s, std::abs(fd1([&](double s) { return L(s, alpha); }, sigma, 1e-5) - lim.d_sigma));
      tri_a = std::max(tri_a, std::abs(fd1([&](double al) { return L(sigma, al); }, alpha, 1e-5) / std::log(d) -
                                       lim.d_alpha_scaled));
    }
  }
  res.checks.push_back({"pair sigma score", pair_s <= 1e-2, fmt("max abs error ", pair_s)});
  res.checks.push_back({"pair alpha score / log d", pair_a <= 1e-2, fmt("max abs error ", pair_a)});
  res.checks.push_back({"triple sigma score", tri_s <= 1e-2, fmt("max abs error ", tri_s)});
  res.checks.push_back({"triple alpha score / log delta", tri_a <= 1e-2, fmt("max abs error ", tri_a)});
  res.seconds = t.seconds();
  res.checks.push_back(runtime_check(res.seconds, 10.0));
  return res;
}

CriterionResult criterion7() {
  Timer t;
  CriterionResult res{7, "H2 decomposition oracle", {}, 0};
  const FieldParams p(1.0, 0.5);
  double worst = 0.0;
  std::size_t two = 0, multi = 0, single = 0;
  for (std::uint64_t r = 0; r < 3; ++r) {
    Rng drng = make_stream(7, r, StreamPurpose::kDesign);
    const auto design = make_design(1024, 0, drng);
    Rng pilot = make_stream(7, r, StreamPurpose::kPilot);
    const DesignSimulator sim(design, p, {}, pilot);
    Rng rng = make_stream(7, r, StreamPurpose::kField);
    const auto real = sim.simulate(rng);
    const auto rep = decomposition_check(real.sample.record, design.column, design.tri.vertices, design.edges, p);
    worst = std::max(worst, rep.max_abs_residual);
    single += rep.single_path, two += rep.two_path, multi += rep.multi_path;
  }
  res.checks.push_back({"max residual <= 1e-10", worst <= 1e-10,
                        fmt("residual ", worst, " over ", single, " single, ", two, " two-path, ", multi, " other edges")});
  res.seconds = t.seconds();
  res.checks.push_back(runtime_check(res.seconds, 60.0));
  return res;
}

namespace {

std::vector<ReplicateResult> run_rows(const Scale& scale, const std::vector<double>& ns, std::uint64_t reps, int grid,
                                      bool estimates, std::ostream* log) {
  cli::ExperimentConfig cfg;
  cfg.intensities = ns;
  cfg.replicates = reps;
  cfg.grid = grid;
  cfg.seed = scale.seed;
  cfg.workers = scale.workers;
  auto opt = cli::replicate_options(cfg);
  opt.estimates = estimates;
  opt.statistics = true;
  std::vector<ReplicateResult> rows;
  cli::run_experiment(cfg, opt, {}, [&](const ReplicateResult& r) { rows.push_back(r); }, log);
  return rows;
}

std::string errors_of(const std::vector<ReplicateResult>& rows) {
  std::size_t e = 0;
  for (const auto& r : rows) e += !r.error.empty();
  return fmt(e, " of ", rows.size(), " replicates failed");
}

}  // namespace

CriterionResult criterion8(const Scale& scale) {
  Timer t;
  CriterionResult res{8, "V-statistic growth and local time", {}, 0};
  const double alpha = 0.5;
  const auto rows = run_rows(scale, scale.growth_intensities, scale.growth_replicates, scale.growth_grid, false, nullptr);
  const auto rep = summarize_growth(rows, alpha);
  const double want = (2 - alpha) / 4;
  res.checks.push_back({"replicates", errors_of(rows).rfind("0 of", 0) == 0, errors_of(rows)});
  res.checks.push_back({"slope of log median|V2| = (2-alpha)/4 +- 0.1", std::abs(rep.v2_growth_slope - want) <= 0.1,
                        fmt("slope ", rep.v2_growth_slope, ", target ", want)});
  res.checks.push_back({"pooled c_V2 < 0", rep.pooled_c_v2 < 0, fmt("c_V2 = ", rep.pooled_c_v2)});
  const double corr = rep.levels.empty() ? 0.0 : rep.levels.back().corr_v2_v3;
  res.checks.push_back({"corr(V2, V3) >= 0.8 at largest N", corr >= 0.8, fmt("corr ", corr)});
  std::string info;
  for (const auto& lv : rep.levels)
    info += fmt("N=", lv.intensity, ": med|V2|=", lv.median_abs_v2, " R2=", lv.r2_v2, " neg=", lv.negative_fraction,
                " ratio-disp=", lv.ratio_dispersion, "; ");
  res.checks.push_back({"per-level diagnostics (informational)", true, info});
  res.seconds = t.seconds();
  res.checks.push_back(runtime_check(res.seconds, 4 * 3600.0));
  return res;
}

CriterionResult criterion9(const Scale& scale) {
  Timer t;
  CriterionResult res{9, "estimator error rates", {}, 0};
  const FieldParams p0(1.0, 0.5);
  const auto rows = run_rows(scale, scale.rate_intensities, scale.rate_replicates, 0, true, nullptr);
  const auto rep = summarize_rates(rows, p0);
  const double want = -p0.alpha() / 4;
  res.checks.push_back({"replicates", errors_of(rows).rfind("0 of", 0) == 0, errors_of(rows)});
  res.checks.push_back({"slope of median|sigma2 - 1| = -alpha/4 +- 0.08", std::abs(rep.sigma_rate_slope - want) <= 0.08,
                        fmt("slope ", rep.sigma_rate_slope, ", target ", want)});
  res.checks.push_back({"slope of median|alpha - alpha0| log N = -alpha/4 +- 0.08",
                        std::abs(rep.alpha_rate_slope - want) <= 0.08, fmt("slope ", rep.alpha_rate_slope, ", target ", want)});
  const double opp = rep.levels.empty() ? 0.0 : rep.levels.back().opposite_sign_fraction;
  res.checks.push_back({"opposite signs >= 80% at largest N", opp >= 0.8, fmt(opp)});
  std::string info;
  for (const auto& lv : rep.levels)
    info += fmt("N=", lv.intensity, ": med|s2-1|=", lv.median_sigma_error, " med|a-a0|logN=", lv.median_alpha_error_logn,
                " P(|s2-1|>0.2)=", lv.sigma_exceed_fraction, " opp=", lv.opposite_sign_fraction,
                " corr(pair,triple)=", lv.corr_pair_triple, "; ");
  res.checks.push_back({"per-level diagnostics (informational)", true, info});
  res.seconds = t.seconds();
  res.checks.push_back(runtime_check(res.seconds, 4 * 3600.0));
  return res;
}

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Drops the wall_time column of a results table.
std::string strip_wall_time(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  std::size_t col = std::string::npos;
  while (std::getline(in, line)) {
    auto cells = cli::csv_split(line);
    if (col == std::string::npos)
      col = static_cast<std::size_t>(std::find(cells.begin(), cells.end(), "wall_time") - cells.begin());
    if (col < cells.size()) cells.erase(cells.begin() + static_cast<long>(col));
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cli::csv_field(cells[i]);
    out += '\n';
  }
  return out;
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a)) files.push_back(e.path().filename());
  std::size_t nb = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++nb;
  if (files.size() != nb) {
    why = "different file sets";
    return false;
  }
  for (const auto& f : files) {
    std::string x = slurp(a / f), y = slurp(b / f);
    if (f == "results.csv") x = strip_wall_time(x), y = strip_wall_time(y);
    if (x != y) {
      why = f.string() + " differs";
      return false;
    }
  }
  why = std::to_string(files.size()) + " files identical";
  return true;
}

}  // namespace

CriterionResult criterion10(const fs::path& workdir) {
  Timer t;
  CriterionResult res{10, "reproducibility", {}, 0};
  fs::remove_all(workdir);
  fs::create_directories(workdir);
  {
    std::ofstream cfg(workdir / "repro.cfg");
    cfg << "intensities = 128, 256\nreplicates = 2\nsigma = 1\nalpha = 0.5\ndelta = 1e-4\ngrid = 32\nseed = 77\n"
           "pilot_reps = 1000\nsamples = 2000\n";
  }
  std::ostringstream sink;
  auto run_twice = [&](const char* name, cli::Command cmd, int (*fn)(const cli::ExperimentConfig&, std::ostream&)) {
    std::string why;
    bool ok = true;
    for (const char* tag : {"a", "b"}) {
      auto cfg = cli::load_config(workdir / "repro.cfg", cmd);
      cfg.output = (workdir / name / tag).string();
      cfg.workers = tag[0] == 'a' ? 1 : 2;
      ok = ok && fn(cfg, sink) == cli::kExitOk;
    }
    ok = ok && same_tree(workdir / name / "a", workdir / name / "b", why);
    res.checks.push_back({std::string(name) + " twice", ok, why});
  };
  run_twice("simulate", cli::Command::kSimulate, cli::cmd_simulate);
  run_twice("estimate", cli::Command::kEstimate, cli::cmd_estimate);
  run_twice("typical-cell", cli::Command::kTypicalCell, cli::cmd_typical_cell);
  {
    // A rerun into a finished directory appends nothing.
    auto cfg = cli::load_config(workdir / "repro.cfg", cli::Command::kEstimate);
    cfg.output = (workdir / "estimate" / "a").string();
    const std::string before = slurp(workdir / "estimate" / "a" / "results.csv");
    const int code = cli::cmd_estimate(cfg, sink);
    const std::string after = slurp(workdir / "estimate" / "a" / "results.csv");
    res.checks.push_back({"estimate resume", code == cli::kExitOk && before == after,
                          fmt(std::count(after.begin(), after.end(), '\n') - 1, " rows after rerun")});
  }
  {
    std::ostringstream a, b;
    const int ca = cli::cmd_verify("numerics", {}, a), cb = cli::cmd_verify("numerics", {}, b);
    res.checks.push_back({"verify twice", ca == cb && a.str() == b.str(), fmt("exit codes ", ca, ", ", cb)});
  }
  res.seconds = t.seconds();
  return res;
}

CriterionResult run_criterion(int id, const Scale& scale) {
  switch (id) {
    case 1: return criterion1();
    case 2: return criterion2();
    case 3: return criterion3();
    case 4: return criterion4();
    case 5: return criterion5();
    case 6: return criterion6();
    case 7: return criterion7();
    case 8: return criterion8(scale);
    case 9: return criterion9(scale);
    case 10: return criterion10(fs::temp_directory_path() / "brcl-criterion10");
    default: throw std::out_of_range("no criterion " + std::to_string(id));
  }
}

}  // namespace brcl::verify
