// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Poisson site patterns on the unit cell plus margin, the ordered Delaunay
// edge and triangle sets restricted to C = (-1/2, 1/2]^2, and the typical
// cell / typical edge laws of the Poisson-Delaunay tessellation.

#pragma once

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <vector>

#include "brcl/core.hpp"
#include "brcl/delaunay.hpp"
#include "brcl/rng.hpp"

namespace brcl {

struct Window {
  double xmin = -0.5, xmax = 0.5, ymin = -0.5, ymax = 0.5;

  double area() const { return (xmax - xmin) * (ymax - ymin); }
  bool contains(const Point& p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
};

struct PointPattern {
  std::vector<Point> points;
  double intensity = 0.0;
  Window window;
};

//! Membership in the half-open unit cell C = (-1/2, 1/2]^2.
inline bool in_unit_cell(const Point& p) { return p.x > -0.5 && p.x <= 0.5 && p.y > -0.5 && p.y <= 0.5; }

//! 3 log(N) / sqrt(N), floored at zero for N <= 1.
inline double default_margin(double intensity) {
  detail::require_positive(intensity, "default_margin: intensity");
  return std::max(0.0, 3.0 * std::log(intensity) / std::sqrt(intensity));
}

//! Homogeneous Poisson pattern on [-1/2 - margin, 1/2 + margin]^2.
inline PointPattern sample_poisson(double intensity, double margin, Rng& rng) {
  detail::require_positive(intensity, "sample_poisson: intensity");
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw DomainError("sample_poisson: margin must be finite and >= 0");
  PointPattern pat;
  pat.intensity = intensity;
  pat.window = {-0.5 - margin, 0.5 + margin, -0.5 - margin, 0.5 + margin};
  std::poisson_distribution<long long> count(intensity * pat.window.area());
  const long long n = count(rng);
  pat.points.reserve(static_cast<std::size_t>(n));
  const double side = 1.0 + 2.0 * margin;
  for (long long i = 0; i < n; ++i) {
    const double x = pat.window.xmin + side * uniform_open(rng);
    const double y = pat.window.ymin + side * uniform_open(rng);
    pat.points.push_back({x, y});
  }
  return pat;
}

inline Triangulation delaunay(const PointPattern& pattern) { return delaunay(pattern.points); }

//! Ordered pairs (i, j) of Delaunay neighbours with vertex i in C and
//! vertex i lexicographically before vertex j.
struct EdgeSet {
  std::vector<std::array<int, 2>> pairs;

  std::size_t size() const { return pairs.size(); }
};

//! Lexicographically sorted Delaunay triples with the first vertex in C.
struct TriangleSet {
  std::vector<std::array<int, 3>> triples;
  std::size_t excluded_degenerate = 0;  //!< dropped by the minimum-angle filter

  std::size_t size() const { return triples.size(); }
};

inline EdgeSet edge_set(const Triangulation& tri) {
  EdgeSet out;
  for (const auto& [a, b] : tri.edges) {
    int i = a, j = b;
    if (tri.vertices[static_cast<std::size_t>(j)] < tri.vertices[static_cast<std::size_t>(i)]) std::swap(i, j);
    if (in_unit_cell(tri.vertices[static_cast<std::size_t>(i)])) out.pairs.push_back({i, j});
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

//! Smallest interior angle of a triangle, in radians.
inline double min_angle(const Point& a, const Point& b, const Point& c) {
  auto angle = [](const Point& o, const Point& p, const Point& q) {
    const double ux = p.x - o.x, uy = p.y - o.y, vx = q.x - o.x, vy = q.y - o.y;
    return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

inline TriangleSet triangle_set(const Triangulation& tri, double min_angle_rad = 1e-6) {
  TriangleSet out;
  const auto& v = tri.vertices;
  for (const auto& t : tri.triangles) {
    std::array<int, 3> s = t;
    std::sort(s.begin(), s.end(), [&](int p, int q) {
      return v[static_cast<std::size_t>(p)] < v[static_cast<std::size_t>(q)];
    });
    if (!in_unit_cell(v[static_cast<std::size_t>(s[0])])) continue;
    if (min_angle(v[static_cast<std::size_t>(s[0])], v[static_cast<std::size_t>(s[1])],
                  v[static_cast<std::size_t>(s[2])]) < min_angle_rad) {
      ++out.excluded_degenerate;
      continue;
    }
    out.triples.push_back(s);
  }
  std::sort(out.triples.begin(), out.triples.end());
  return out;
}

//! Sorted ids of all vertices referenced by the edge and triangle sets.
inline std::vector<int> used_vertices(const EdgeSet& edges, const TriangleSet& triangles) {
  std::vector<int> ids;
  for (const auto& e : edges.pairs) ids.insert(ids.end(), e.begin(), e.end());
  for (const auto& t : triangles.triples) ids.insert(ids.end(), t.begin(), t.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

inline void write_vertices_csv(std::ostream& os, const Triangulation& tri) {
  const auto old = os.precision(17);
  os << "id,x,y\n";
  for (std::size_t i = 0; i < tri.vertices.size(); ++i) os << i << ',' << tri.vertices[i].x << ',' << tri.vertices[i].y << '\n';
  os.precision(old);
}

inline void write_edges_csv(std::ostream& os, const EdgeSet& edges) {
  os << "i,j\n";
  for (const auto& e : edges.pairs) os << e[0] << ',' << e[1] << '\n';
}

inline void write_triangles_csv(std::ostream& os, const TriangleSet& triangles) {
  os << "i,j,k\n";
  for (const auto& t : triangles.triples) os << t[0] << ',' << t[1] << ',' << t[2] << '\n';
}

// ---------------------------------------------------------------------------
// Typical cell and typical edge (unit intensity).

struct TypicalCell {
  std::array<Point, 3> vertices;
  double radius = 0.0;  //!< circumradius

  double area() const {
    const auto& [a, b, c] = vertices;
    return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  }
};

//! Rejection sampler for the typical Poisson-Delaunay cell at intensity 1.
class TypicalCellSampler {
 public:
  static constexpr double kMaxUnitArea = 1.299038105676657970;  // 3 sqrt(3) / 4

  TypicalCell sample(Rng& rng) {
    TypicalCell cell;
    cell.radius = std::sqrt((standard_exponential(rng) + standard_exponential(rng)) / kPi);
    std::array<double, 3> th{};
    for (;;) {
      ++proposals_;
      for (double& t : th) t = 2.0 * kPi * uniform_open(rng);
      const double a = 0.5 * std::abs(std::sin(th[1] - th[0]) + std::sin(th[2] - th[1]) + std::sin(th[0] - th[2]));
      if (uniform_open(rng) * kMaxUnitArea < a) break;
    }
    ++accepted_;
    for (int i = 0; i < 3; ++i) cell.vertices[i] = {cell.radius * std::cos(th[i]), cell.radius * std::sin(th[i])};
    return cell;
  }

  std::size_t proposals() const { return proposals_; }
  std::size_t accepted() const { return accepted_; }
  double acceptance_rate() const { return proposals_ ? static_cast<double>(accepted_) / proposals_ : 0.0; }

 private:
  std::size_t proposals_ = 0;
  std::size_t accepted_ = 0;
};

inline TypicalCell sample_typical_cell(Rng& rng) {
  TypicalCellSampler s;
  return s.sample(rng);
}

struct QuadratureConfig {
  double tolerance = 1e-10;
  unsigned max_depth = 15;
};

//! P[D <= l] for the typical edge length D at intensity 1.
//!
//! Integrating the radius out of the cell law leaves one angle,
//!   P[D <= l] = 2/(3 pi) int_0^{2 pi} w(p) G(pi l^2 / (4 sin^2(p/2))) dp,
//! with w(p) = s (s + (pi - p/2) c), s = sin(p/2), c = cos(p/2), and
//! G(x) = 1 - (1 + x) e^{-x}.
inline double typical_edge_cdf(double ell, const QuadratureConfig& cfg = {}) {
  if (std::isnan(ell) || ell < 0.0) throw DomainError("typical_edge_cdf: length must be >= 0");
  if (ell == 0.0) return 0.0;
  if (std::isinf(ell)) return 1.0;
  const double l2 = kPi * ell * ell / 4.0;
  auto integrand = [l2](double p) {
    const double s = std::sin(0.5 * p), c = std::cos(0.5 * p);
    const double w = s * (s + (kPi - 0.5 * p) * c);
    if (s == 0.0) return 0.0;
    const double x = l2 / (s * s);
    return w * -std::expm1(-x) - w * x * std::exp(-x);
  };
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, 2.0 * kPi, cfg.max_depth, cfg.tolerance, &err);
  if (!(err <= std::max(cfg.tolerance * 10.0, 1e-13) * std::max(1.0, std::abs(val))))
    throw NumericalError("typical_edge_cdf: quadrature did not reach tolerance");
  return std::clamp(2.0 / (3.0 * kPi) * val, 0.0, 1.0);
}

}  // namespace brcl
