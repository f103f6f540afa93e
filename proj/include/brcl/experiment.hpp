// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Site designs, field realizations on them, and the per-replicate
// statistics shared by the CLI and the acceptance battery.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "brcl/asymptotics.hpp"
#include "brcl/estimation.hpp"
#include "brcl/fields.hpp"
#include "brcl/geometry.hpp"
#include "brcl/likelihood.hpp"
#include "brcl/rng.hpp"
#include "brcl/stats.hpp"

namespace brcl {

//! Seed of the streams belonging to intensity N; replicate ids and purpose
//! tags then split it further.
inline std::uint64_t intensity_seed(std::uint64_t seed, double intensity) {
  return detail::splitmix64(seed ^ detail::splitmix64(static_cast<std::uint64_t>(std::llround(intensity))));
}

inline Rng replicate_stream(std::uint64_t seed, double intensity, std::uint64_t replicate, StreamPurpose purpose) {
  return make_stream(intensity_seed(seed, intensity), replicate, purpose);
}

//! Poisson sites, their triangulation and the subsets carrying field values.
struct SiteDesign {
  double intensity = 0.0;
  PointPattern pattern;
  Triangulation tri;
  EdgeSet edges;
  TriangleSet triangles;
  std::vector<int> used;    //!< vertex ids carrying field values
  std::vector<int> column;  //!< vertex id -> evaluation column, -1 if unused
  int grid = 0;             //!< local-time grid resolution, 0 for none
  std::vector<int> grid_columns;

  std::vector<Point> eval_points() const {
    std::vector<Point> pts;
    pts.reserve(used.size() + grid_columns.size());
    for (int v : used) pts.push_back(tri.vertices[static_cast<std::size_t>(v)]);
    if (grid > 0)
      for (const auto& g : unit_grid(grid)) pts.push_back(g);
    return pts;
  }
};

inline SiteDesign make_design(double intensity, int grid, Rng& rng, double margin = -1.0) {
  if (grid < 0) throw DomainError("make_design: grid must be >= 0");
  SiteDesign d;
  d.intensity = intensity;
  d.pattern = sample_poisson(intensity, margin < 0.0 ? default_margin(intensity) : margin, rng);
  d.tri = delaunay(d.pattern);
  d.edges = edge_set(d.tri);
  d.triangles = triangle_set(d.tri);
  d.used = used_vertices(d.edges, d.triangles);
  d.column.assign(d.tri.vertices.size(), -1);
  for (std::size_t c = 0; c < d.used.size(); ++c) d.column[static_cast<std::size_t>(d.used[c])] = static_cast<int>(c);
  d.grid = grid;
  for (int g = 0; g < grid * grid; ++g) d.grid_columns.push_back(static_cast<int>(d.used.size()) + g);
  return d;
}

//! One Brown-Resnick realization on a design.
struct Realization {
  std::vector<double> eta;  //!< by vertex id, NaN where unused
  FieldSample sample;

  SiteView view(const SiteDesign& d) const { return {d.tri.vertices, eta}; }
};

//! Covariance factor and stopping bound for a design, built once and shared
//! by all replicates.
class DesignSimulator {
 public:
  DesignSimulator(const SiteDesign& design, const FieldParams& params, const BrownResnickOptions& options, Rng& pilot)
      : design_(&design), sampler_(EvalPoints(design.eval_points()), params, options, pilot) {}

  Realization simulate(Rng& rng) const {
    Realization r;
    r.sample = sampler_.sample(rng);
    r.eta.assign(design_->tri.vertices.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < design_->used.size(); ++c)
      r.eta[static_cast<std::size_t>(design_->used[c])] = r.sample.eta(static_cast<Eigen::Index>(c));
    return r;
  }

  const BrownResnickSampler& sampler() const { return sampler_; }

 private:
  const SiteDesign* design_;
  BrownResnickSampler sampler_;
};

struct ReplicateOptions {
  FieldParams params{1.0, 0.5};
  CompactInterval sigma_set = default_sigma_set();
  CompactInterval alpha_set = default_alpha_set();
  double bandwidth = 0.0;  //!< 0 selects default_bandwidth
  bool estimates = true;
  bool triplewise = true;
  bool statistics = true;
};

struct ReplicateResult {
  std::uint64_t replicate = 0;
  double intensity = 0.0;
  double sigma2_2 = kNaN, sigma2_3 = kNaN, alpha_2 = kNaN, alpha_3 = kNaN;
  double v2 = kNaN, v3 = kNaN, local_time = kNaN;
  std::size_t edges = 0, triangles = 0, retained = 0;
  double wall_time = 0.0;
  std::string error;

  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
};

//! Simulates replicate r on the design and computes the estimators,
//! V-statistics and local-time total. Failures are reported in `error`.
inline ReplicateResult run_replicate(const SiteDesign& design, const DesignSimulator& sim, std::uint64_t seed,
                                     std::uint64_t r, const ReplicateOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  ReplicateResult out;
  out.replicate = r;
  out.intensity = design.intensity;
  out.edges = design.edges.size();
  out.triangles = design.triangles.size();
  try {
    Rng rng = replicate_stream(seed, design.intensity, r, StreamPurpose::kField);
    const Realization real = sim.simulate(rng);
    out.retained = real.sample.record.retained();
    const SiteView view = real.view(design);
    const FieldParams& p = opt.params;
    if (opt.statistics) {
      out.v2 = v2_statistic(view, design.edges, p);
      out.v3 = v3_statistic(view, design.triangles, p).value;
      if (design.grid > 0) {
        const auto part = cell_partition(real.sample.record, design.grid_columns, design.grid);
        const double eps = opt.bandwidth > 0.0 ? opt.bandwidth : default_bandwidth(p, design.grid);
        out.local_time = local_time_at_zero(real.sample.record, part, eps).total;
      }
    }
    if (opt.estimates) {
      const double s2 = mcle_sigma(view, design.edges, p.alpha(), opt.sigma_set).estimate;
      out.sigma2_2 = s2 * s2;
      out.alpha_2 = mcle_alpha(view, design.edges, p.sigma(), opt.alpha_set).estimate;
      if (opt.triplewise) {
        const double s3 = mcle_sigma(view, design.triangles, p.alpha(), opt.sigma_set).estimate;
        out.sigma2_3 = s3 * s3;
        out.alpha_3 = mcle_alpha(view, design.triangles, p.sigma(), opt.alpha_set).estimate;
      }
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------------------
// V-statistic growth summaries.

//! sqrt(3)/3 N^{-(2-alpha)/4} V2 and sqrt(2)/2 N^{-(2-alpha)/4} V3.
inline double scaled_v2(double v2, double intensity, double alpha) {
  return std::sqrt(3.0) / 3.0 * std::pow(intensity, -(2.0 - alpha) / 4.0) * v2;
}
inline double scaled_v3(double v3, double intensity, double alpha) {
  return std::sqrt(2.0) / 2.0 * std::pow(intensity, -(2.0 - alpha) / 4.0) * v3;
}

struct GrowthLevel {
  double intensity = 0.0;
  std::size_t replicates = 0;
  double median_abs_v2 = 0.0, median_abs_v3 = 0.0;
  double c_v2 = 0.0, c_v3 = 0.0;  //!< regression slopes on the local-time total
  double r2_v2 = 0.0, r2_v3 = 0.0;
  double corr_v2_v3 = 0.0;
  double ratio_dispersion = 0.0;  //!< MAD / |median| of scaled V2 / scaled V3
  double negative_fraction = 0.0;  //!< replicates with scaled V2 < 0
};

struct GrowthReport {
  std::vector<GrowthLevel> levels;
  double v2_growth_slope = 0.0;  //!< log median |V2| against log N
  double v3_growth_slope = 0.0;
  double pooled_c_v2 = 0.0, pooled_c_v3 = 0.0;
};

inline GrowthReport summarize_growth(const std::vector<ReplicateResult>& rows, double alpha) {
  std::map<double, std::vector<const ReplicateResult*>> by_n;
  for (const auto& r : rows)
    if (r.error.empty() && std::isfinite(r.v2) && std::isfinite(r.v3) && std::isfinite(r.local_time))
      by_n[r.intensity].push_back(&r);
  GrowthReport rep;
  std::vector<double> logn, logv2, logv3, all_l, all_s2, all_s3;
  for (const auto& [n, rs] : by_n) {
    if (rs.size() < 3) continue;
    GrowthLevel lv;
    lv.intensity = n;
    lv.replicates = rs.size();
    std::vector<double> a2, a3, s2, s3, l, ratio;
    std::size_t neg = 0;
    for (const auto* r : rs) {
      a2.push_back(std::abs(r->v2));
      a3.push_back(std::abs(r->v3));
      s2.push_back(scaled_v2(r->v2, n, alpha));
      s3.push_back(scaled_v3(r->v3, n, alpha));
      l.push_back(r->local_time);
      ratio.push_back(s2.back() / s3.back());
      neg += s2.back() < 0.0;
    }
    lv.median_abs_v2 = stats::median(a2);
    lv.median_abs_v3 = stats::median(a3);
    const auto f2 = stats::linear_fit(l, s2), f3 = stats::linear_fit(l, s3);
    lv.c_v2 = f2.slope, lv.r2_v2 = f2.r_squared;
    lv.c_v3 = f3.slope, lv.r2_v3 = f3.r_squared;
    lv.corr_v2_v3 = stats::pearson(s2, s3);
    const double med = stats::median(ratio);
    std::vector<double> dev;
    for (double x : ratio) dev.push_back(std::abs(x - med));
    lv.ratio_dispersion = stats::median(dev) / std::abs(med);
    lv.negative_fraction = static_cast<double>(neg) / static_cast<double>(rs.size());
    rep.levels.push_back(lv);
    logn.push_back(std::log(n));
    logv2.push_back(std::log(lv.median_abs_v2));
    logv3.push_back(std::log(lv.median_abs_v3));
    all_l.insert(all_l.end(), l.begin(), l.end());
    all_s2.insert(all_s2.end(), s2.begin(), s2.end());
    all_s3.insert(all_s3.end(), s3.begin(), s3.end());
  }
  if (logn.size() >= 2) {
    rep.v2_growth_slope = stats::linear_fit(logn, logv2).slope;
    rep.v3_growth_slope = stats::linear_fit(logn, logv3).slope;
  }
  if (all_l.size() >= 2) {
    rep.pooled_c_v2 = stats::linear_fit(all_l, all_s2).slope;
    rep.pooled_c_v3 = stats::linear_fit(all_l, all_s3).slope;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Estimator rate summaries.

struct RateLevel {
  double intensity = 0.0;
  std::size_t replicates = 0;
  double median_sigma_error = 0.0;        //!< median |sigma2_2 - sigma0^2|
  double median_alpha_error_logn = 0.0;   //!< median |alpha_2 - alpha0| log N
  double sigma_exceed_fraction = 0.0;     //!< |sigma2_2 - sigma0^2| > 0.2
  double opposite_sign_fraction = 0.0;
  double corr_pair_triple = 0.0;          //!< sigma2_2 vs sigma2_3 errors
};

struct RateReport {
  std::vector<RateLevel> levels;
  double sigma_rate_slope = 0.0;
  double alpha_rate_slope = 0.0;
};

inline RateReport summarize_rates(const std::vector<ReplicateResult>& rows, const FieldParams& params0) {
  std::map<double, std::vector<const ReplicateResult*>> by_n;
  for (const auto& r : rows)
    if (r.error.empty() && std::isfinite(r.sigma2_2) && std::isfinite(r.alpha_2)) by_n[r.intensity].push_back(&r);
  const double s0 = params0.sigma() * params0.sigma(), a0 = params0.alpha();
  RateReport rep;
  std::vector<double> logn, logs, loga;
  for (const auto& [n, rs] : by_n) {
    if (rs.size() < 3) continue;
    RateLevel lv;
    lv.intensity = n;
    lv.replicates = rs.size();
    std::vector<double> es, ea, e2, e3;
    std::size_t exceed = 0, opposite = 0;
    for (const auto* r : rs) {
      es.push_back(std::abs(r->sigma2_2 - s0));
      ea.push_back(std::abs(r->alpha_2 - a0) * std::log(n));
      exceed += es.back() > 0.2;
      opposite += (r->alpha_2 - a0) * (r->sigma2_2 - s0) < 0.0;
      if (std::isfinite(r->sigma2_3)) {
        e2.push_back(r->sigma2_2 - s0);
        e3.push_back(r->sigma2_3 - s0);
      }
    }
    const double m = static_cast<double>(rs.size());
    lv.median_sigma_error = stats::median(es);
    lv.median_alpha_error_logn = stats::median(ea);
    lv.sigma_exceed_fraction = static_cast<double>(exceed) / m;
    lv.opposite_sign_fraction = static_cast<double>(opposite) / m;
    lv.corr_pair_triple = e2.size() >= 3 ? stats::pearson(e2, e3) : ReplicateResult::kNaN;
    rep.levels.push_back(lv);
    logn.push_back(std::log(n));
    logs.push_back(std::log(lv.median_sigma_error));
    loga.push_back(std::log(lv.median_alpha_error_logn));
  }
  if (logn.size() >= 2) {
    rep.sigma_rate_slope = stats::linear_fit(logn, logs).slope;
    rep.alpha_rate_slope = stats::linear_fit(logn, loga).slope;
  }
  return rep;
}

}  // namespace brcl
