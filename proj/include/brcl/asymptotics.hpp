// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Normalized increments, the squared-increment statistics V2 and V3, the
// H2 spectral decomposition, canonical-tessellation cells and kernel local
// times at level zero.

#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "brcl/core.hpp"
#include "brcl/fields.hpp"
#include "brcl/gaussian.hpp"
#include "brcl/geometry.hpp"
#include "brcl/likelihood.hpp"

namespace brcl {

//! log(eta2 / eta1) / (sigma d^{alpha/2}).
inline double normalized_increment(double eta1, double eta2, double d, const FieldParams& params) {
  detail::require_positive(eta1, "normalized_increment: eta1");
  detail::require_positive(eta2, "normalized_increment: eta2");
  detail::require_positive(d, "normalized_increment: d");
  return std::log(eta2 / eta1) / params.increment_scale(d);
}

inline double hermite2(double u) { return u * u - 1.0; }

enum class PsiFunction { kH2, kIdentity };

//! Psi_f(x, y, w). The first branch owns w = 0, the second is open there.
template <class F>
double psi(F&& f, double x, double y, double w) {
  if (x - y <= w && w <= 0.0) return f(y + w) - f(x);
  if (0.0 < w && w <= x - y) return f(x - w) - f(y);
  return 0.0;
}

inline double psi(PsiFunction f, double x, double y, double w) {
  if (f == PsiFunction::kH2) return psi(hermite2, x, y, w);
  return psi([](double t) { return t; }, x, y, w);
}

//! psi = int_0^inf u phi(u) [1/2 - Phibar(u) - u Phibar(u) Phi(u) / phi(u)] du.
inline double psi_constant(const QuadratureConfig& cfg = {}) {
  auto integrand = [](double u) {
    const double upper = std_normal_cdf(-u);
    return u * std_normal_pdf(u) * (0.5 - upper) - u * u * upper * std_normal_cdf(u);
  };
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), cfg.max_depth, cfg.tolerance, &err);
  if (!(err <= 1e-8)) throw NumericalError("psi_constant: quadrature did not converge");
  return val;
}

// ---------------------------------------------------------------------------
// Increments and V-statistics.

struct TriangleIncrement {
  double u2 = 0, u3 = 0, r1 = 0;
};

inline std::vector<double> edge_increments(const SiteView& data, const EdgeSet& edges, const FieldParams& params) {
  std::vector<double> u;
  u.reserve(edges.size());
  for (const auto& e : edges.pairs) {
    const auto i = static_cast<std::size_t>(e[0]), j = static_cast<std::size_t>(e[1]);
    u.push_back(normalized_increment(data.eta[i], data.eta[j], distance(data.points[i], data.points[j]), params));
  }
  return u;
}

inline std::vector<TriangleIncrement> triangle_increments(const SiteView& data, const TriangleSet& triangles,
                                                          const FieldParams& params) {
  std::vector<TriangleIncrement> out;
  out.reserve(triangles.size());
  for (const auto& t : triangles.triples) {
    const auto i = static_cast<std::size_t>(t[0]), j = static_cast<std::size_t>(t[1]), k = static_cast<std::size_t>(t[2]);
    const TripleGeometry g(data.points[i], data.points[j], data.points[k], params);
    out.push_back({normalized_increment(data.eta[i], data.eta[j], g.d12, params),
                   normalized_increment(data.eta[i], data.eta[k], g.d13, params), g.r1.value()});
  }
  return out;
}

//! |E_N|^{-1/2} sum over edges of H2(U).
inline double v2_statistic(const SiteView& data, const EdgeSet& edges, const FieldParams& params) {
  if (edges.size() == 0) throw DomainError("v2_statistic: empty edge set");
  std::vector<double> terms = edge_increments(data, edges, params);
  for (double& u : terms) u = hermite2(u);
  return detail::pairwise_sum(terms) / std::sqrt(static_cast<double>(terms.size()));
}

struct V3Statistic {
  double value = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  //!< triangles with |r1| = 1
};

//! |DT_N|^{-1/2} sum over triangles of (u' R^{-1} u - 2).
inline V3Statistic v3_statistic(const SiteView& data, const TriangleSet& triangles, const FieldParams& params) {
  if (triangles.size() == 0) throw DomainError("v3_statistic: empty triangle set");
  V3Statistic out;
  std::vector<double> terms;
  terms.reserve(triangles.size());
  for (const auto& t : triangle_increments(data, triangles, params)) {
    if (std::abs(t.r1) >= 1.0) {
      ++out.excluded;
      continue;
    }
    const double q = (t.u2 * t.u2 - 2.0 * t.r1 * t.u2 * t.u3 + t.u3 * t.u3) / (1.0 - t.r1 * t.r1);
    terms.push_back(q - 2.0);
  }
  out.used = terms.size();
  if (out.used == 0) throw DomainError("v3_statistic: every triangle is singular");
  out.value = detail::pairwise_sum(terms) / std::sqrt(static_cast<double>(out.used));
  return out;
}

// ---------------------------------------------------------------------------
// H2 decomposition over spectral functions.

struct DecompositionReport {
  double max_abs_residual = 0.0;
  std::size_t single_path = 0;  //!< both sites maximized by one function
  std::size_t two_path = 0;     //!< both sites in the same cell C_{k,j}
  std::size_t multi_path = 0;   //!< remaining edges
};

namespace detail {

inline std::pair<int, int> top_two(const SpectralRecord& rec, int col) {
  int first = -1, second = -1;
  double f = -std::numeric_limits<double>::infinity(), s = f;
  for (Eigen::Index i = 0; i < rec.z_values.rows(); ++i) {
    const double z = rec.z_values(i, col);
    if (z > f) {
      second = first, s = f;
      first = static_cast<int>(i), f = z;
    } else if (z > s) {
      second = static_cast<int>(i), s = z;
    }
  }
  return {first, second};
}

}  // namespace detail

//! Rebuilds H2(U) on every edge from the retained spectral functions and
//! returns the largest deviation from the direct value. `column[v]` is the
//! record column holding vertex v.
inline DecompositionReport decomposition_check(const SpectralRecord& rec, std::span<const int> column,
                                               std::span<const Point> points, const EdgeSet& edges,
                                               const FieldParams& params) {
  if (rec.retained() == 0 || rec.argmax.size() != rec.points())
    throw ContractError("decomposition_check: missing spectral record");
  DecompositionReport rep;
  for (const auto& e : edges.pairs) {
    const auto v1 = static_cast<std::size_t>(e[0]), v2 = static_cast<std::size_t>(e[1]);
    if (v1 >= column.size() || v2 >= column.size() || column[v1] < 0 || column[v2] < 0)
      throw ContractError("decomposition_check: edge refers to a site without spectral data");
    const int c1 = column[v1], c2 = column[v2];
    const double s = params.increment_scale(distance(points[v1], points[v2]));
    const std::size_t j = static_cast<std::size_t>(rec.argmax[static_cast<std::size_t>(c1)]);
    const std::size_t k = static_cast<std::size_t>(rec.argmax[static_cast<std::size_t>(c2)]);
    auto z = [&](std::size_t i, int c) { return rec.z_values(static_cast<Eigen::Index>(i), c); };
    auto uw = [&](std::size_t i) {
      return (rec.fbm_value(i, static_cast<std::size_t>(c2)) - rec.fbm_value(i, static_cast<std::size_t>(c1))) / s;
    };

    const double u = (z(k, c2) - z(j, c1)) / s;
    const double g = (rec.gamma_values(c2) - rec.gamma_values(c1)) / s;

    double shifted = hermite2(uw(j));
    if (j == k) {
      ++rep.single_path;
    } else {
      const auto t1 = detail::top_two(rec, c1), t2 = detail::top_two(rec, c2);
      const auto lo = std::min(j, k), hi = std::max(j, k);
      auto same_cell = [&](std::pair<int, int> t) {
        return std::min(t.first, t.second) == static_cast<int>(lo) && std::max(t.first, t.second) == static_cast<int>(hi);
      };
      if (same_cell(t1) && same_cell(t2) && in_unit_cell(points[v1]) && in_unit_cell(points[v2])) {
        ++rep.two_path;
        shifted += psi(hermite2, uw(lo), uw(hi), (z(hi, c1) - z(lo, c1)) / s);
      } else {
        ++rep.multi_path;
        shifted += hermite2(uw(k) + (z(k, c1) - z(j, c1)) / s) - hermite2(uw(j));
      }
    }
    const double rebuilt = shifted - 2.0 * u * g - g * g;
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(rebuilt - hermite2(u)));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Canonical tessellation and local time.

//! Cell centres of a G x G grid on C, row-major from (-1/2, -1/2).
inline std::vector<Point> unit_grid(int resolution) {
  if (resolution < 1) throw DomainError("unit_grid: resolution must be >= 1");
  std::vector<Point> g;
  g.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  const double h = 1.0 / resolution;
  for (int r = 0; r < resolution; ++r)
    for (int c = 0; c < resolution; ++c) g.push_back({-0.5 + (c + 0.5) * h, -0.5 + (r + 0.5) * h});
  return g;
}

struct CellPartition {
  int resolution = 0;
  std::vector<int> columns;                             //!< record column of each grid point
  std::map<std::pair<int, int>, std::vector<int>> cells;  //!< (k, j), k > j -> grid indices
  std::size_t single = 0;  //!< points with a single retained function

  double cell_area() const { return 1.0 / (static_cast<double>(resolution) * resolution); }
  double area(std::pair<int, int> kj) const {
    const auto it = cells.find(kj);
    return it == cells.end() ? 0.0 : static_cast<double>(it->second.size()) * cell_area();
  }
};

//! Groups grid points by the unordered pair of their two largest Z values.
inline CellPartition cell_partition(const SpectralRecord& rec, std::span<const int> grid_columns, int resolution) {
  if (resolution < 1 || grid_columns.size() != static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution))
    throw ContractError("cell_partition: grid columns do not match the resolution");
  CellPartition part;
  part.resolution = resolution;
  part.columns.assign(grid_columns.begin(), grid_columns.end());
  for (std::size_t p = 0; p < grid_columns.size(); ++p) {
    const auto [a, b] = detail::top_two(rec, grid_columns[p]);
    if (b < 0) {
      ++part.single;
      continue;
    }
    part.cells[{std::max(a, b), std::min(a, b)}].push_back(static_cast<int>(p));
  }
  return part;
}

struct PairLocalTime {
  int k = 0, j = 0;
  double value = 0.0;
  std::size_t points = 0;
};

struct LocalTimeEstimate {
  std::vector<PairLocalTime> pairs;
  double bandwidth = 0.0;
  int resolution = 0;
  double total = 0.0;
};

//! sigma^2 h^alpha with h the grid spacing.
inline double default_bandwidth(const FieldParams& params, int resolution) {
  return params.sigma() * params.sigma() * std::pow(1.0 / resolution, params.alpha());
}

//! Gaussian-kernel occupation density of Z_k - Z_j at 0 over each cell.
inline LocalTimeEstimate local_time_at_zero(const SpectralRecord& rec, const CellPartition& part, double bandwidth) {
  detail::require_positive(bandwidth, "local_time_at_zero: bandwidth");
  if (part.resolution < 32) throw DomainError("local_time_at_zero: grid resolution must be >= 32");
  LocalTimeEstimate out;
  out.bandwidth = bandwidth;
  out.resolution = part.resolution;
  const double norm = 1.0 / std::sqrt(2.0 * kPi * bandwidth);
  std::vector<double> totals;
  for (const auto& [kj, pts] : part.cells) {
    std::vector<double> terms;
    terms.reserve(pts.size());
    for (int p : pts) {
      const int c = part.columns[static_cast<std::size_t>(p)];
      const double diff = rec.z_values(kj.first, c) - rec.z_values(kj.second, c);
      terms.push_back(norm * std::exp(-diff * diff / (2.0 * bandwidth)));
    }
    const double v = detail::pairwise_sum(terms) * part.cell_area();
    out.pairs.push_back({kj.first, kj.second, v, pts.size()});
    totals.push_back(v);
  }
  out.total = detail::pairwise_sum(totals);
  return out;
}

}  // namespace brcl
