// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <set>
#include <sstream>

#include "brcl/geometry.hpp"
#include "brcl/stats.hpp"

namespace {

using brcl::Point;

std::vector<Point> uniform_points(std::size_t n, std::uint64_t seed) {
  brcl::Rng rng(seed);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {brcl::uniform_open(rng) - 0.5, brcl::uniform_open(rng) - 0.5};
  return pts;
}

// Andrew's monotone chain; points on the hull boundary, collinear ones included.
std::size_t hull_size(const std::vector<Point>& input) {
  std::vector<Point> p = input;
  std::sort(p.begin(), p.end(), [](const Point& a, const Point& b) { return a < b; });
  std::vector<Point> h(2 * p.size());
  std::size_t k = 0;
  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i - 1]) <= 0) --k;
    h[k++] = p[i - 1];
  }
  std::size_t on_boundary = 0;
  for (const auto& q : input) {
    for (std::size_t e = 0; e + 1 < k; ++e) {
      const Point& a = h[e];
      const Point& b = h[e + 1];
      if (cross(a, b, q) == 0.0 && std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) &&
          std::min(a.y, b.y) <= q.y && q.y <= std::max(a.y, b.y)) {
        ++on_boundary;
        break;
      }
    }
  }
  return on_boundary;
}

double cross_area(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

}  // namespace

TEST(Delaunay, UnitSquare) {
  const std::vector<Point> sq = {{0, 0}, {0.25, 0}, {0, 0.25}, {0.25, 0.25}};
  const auto tri = brcl::delaunay(sq);
  EXPECT_EQ(tri.triangles.size(), 2u);
  EXPECT_EQ(tri.edges.size(), 5u);
  // Cocircular tie resolved by insertion order; the outcome is stable.
  const auto again = brcl::delaunay(sq);
  EXPECT_EQ(tri.triangles, again.triangles);
  for (const auto& t : tri.triangles) EXPECT_GT(cross_area(sq[t[0]], sq[t[1]], sq[t[2]]), 0.0);

  const auto es = brcl::edge_set(tri);
  EXPECT_EQ(es.size(), 5u);
  for (const auto& e : es.pairs) EXPECT_TRUE(sq[e[0]] < sq[e[1]]);
  const auto ts = brcl::triangle_set(tri);
  EXPECT_EQ(ts.size(), 2u);
  for (const auto& t : ts.triples) {
    EXPECT_TRUE(sq[t[0]] < sq[t[1]]);
    EXPECT_TRUE(sq[t[1]] < sq[t[2]]);
  }
}

TEST(Delaunay, EdgeSetRespectsCell) {
  // (0.6, 0) lies outside C, so only edges whose lexicographic first vertex is in C remain.
  const std::vector<Point> pts = {{0.6, 0.0}, {0.7, 0.1}, {0.65, 0.3}, {0.0, 0.0}};
  const auto tri = brcl::delaunay(pts);
  const auto es = brcl::edge_set(tri);
  for (const auto& e : es.pairs) EXPECT_EQ(e[0], 3);
  std::size_t from3 = 0;
  for (const auto& [a, b] : tri.edges) from3 += (a == 3 || b == 3);
  EXPECT_EQ(es.size(), from3);
}

TEST(Delaunay, DegenerateInput) {
  EXPECT_THROW(brcl::delaunay(std::vector<Point>{{0, 0}, {1, 1}}), brcl::DegenerateInputError);
  EXPECT_THROW(brcl::delaunay(std::vector<Point>{{0, 0}, {1, 1}, {2, 2}, {3, 3}}), brcl::DegenerateInputError);
  EXPECT_THROW(brcl::delaunay(std::vector<Point>{{0, 0}, {1, 0}, {0, 1}, {1, 0}}), brcl::DegenerateInputError);
  EXPECT_THROW(brcl::delaunay(std::vector<Point>{{0, 0}, {1, 0}, {0, NAN}}), brcl::DegenerateInputError);
}

TEST(Delaunay, EmptyCircumdiskExhaustive) {
  const auto pts = uniform_points(1000, 7);
  const auto tri = brcl::delaunay(pts);
  ASSERT_EQ(tri.circumcenters.size(), tri.triangles.size());
  std::size_t violations = 0;
  for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
    const Point& c = tri.circumcenters[t];
    const double r = brcl::distance(c, pts[tri.triangles[t][0]]);
    for (const auto& p : pts)
      if (brcl::distance(c, p) < r * (1.0 - 1e-10)) ++violations;
  }
  EXPECT_EQ(violations, 0u);
}

TEST(Delaunay, EulerRelation) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto pts = uniform_points(2000 + 37 * seed, seed);
    const auto tri = brcl::delaunay(pts);
    const std::size_t n = pts.size(), h = hull_size(pts);
    EXPECT_EQ(tri.triangles.size(), 2 * n - 2 - h);
    EXPECT_EQ(tri.edges.size(), 3 * n - 3 - h);
  }
}

TEST(Delaunay, GridWithTies) {
  // Many cocircular quadruples; the exact predicates keep the result valid.
  std::vector<Point> pts;
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) pts.push_back({0.1 * i, 0.1 * j});
  const auto tri = brcl::delaunay(pts);
  EXPECT_EQ(tri.triangles.size(), 2u * 14 * 14);
  double area = 0.0;
  for (const auto& t : tri.triangles) area += 0.5 * cross_area(pts[t[0]], pts[t[1]], pts[t[2]]);
  EXPECT_NEAR(area, 1.4 * 1.4, 1e-12);
}

TEST(Delaunay, SmallIntegerPatterns) {
  // Coarse lattice coordinates: many collinear and cocircular subsets, hull slivers.
  brcl::Rng rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    std::set<std::pair<int, int>> cells;
    const int n = 4 + static_cast<int>(rng() % 30);
    while (static_cast<int>(cells.size()) < n) cells.insert({static_cast<int>(rng() % 7), static_cast<int>(rng() % 7)});
    std::vector<Point> pts;
    for (const auto& [x, y] : cells) pts.push_back({0.125 * x, 0.125 * y});
    bool collinear = true;
    for (std::size_t i = 2; i < pts.size(); ++i) collinear = collinear && cross_area(pts[0], pts[1], pts[i]) == 0.0;
    if (collinear) continue;
    const auto tri = brcl::delaunay(pts);
    const std::size_t h = hull_size(pts);
    ASSERT_EQ(tri.triangles.size(), 2 * pts.size() - 2 - h) << trial;
    for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
      const auto& v = tri.triangles[t];
      ASSERT_GT(cross_area(pts[v[0]], pts[v[1]], pts[v[2]]), 0.0);
      for (const auto& p : pts) ASSERT_LE(brcl::predicates::incircle(pts[v[0]], pts[v[1]], pts[v[2]], p), 0);
    }
  }
}

TEST(Delaunay, MeanDegreeNearSix) {
  brcl::Rng rng(11);
  const auto pat = brcl::sample_poisson(20000, 0.0, rng);
  const auto tri = brcl::delaunay(pat);
  std::vector<int> deg(pat.points.size(), 0);
  for (const auto& [a, b] : tri.edges) ++deg[a], ++deg[b];
  double s = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < deg.size(); ++i) {
    const auto& p = pat.points[i];
    if (std::abs(p.x) < 0.4 && std::abs(p.y) < 0.4) s += deg[i], ++m;
  }
  EXPECT_NEAR(s / m, 6.0, 0.05);
}

TEST(Delaunay, Deterministic) {
  const auto pts = uniform_points(3000, 5);
  const auto a = brcl::delaunay(pts);
  const auto b = brcl::delaunay(pts);
  EXPECT_EQ(a.triangles, b.triangles);
  EXPECT_EQ(a.edges, b.edges);
}

TEST(Poisson, RejectsBadArguments) {
  brcl::Rng rng(1);
  EXPECT_THROW(brcl::sample_poisson(0.0, 0.0, rng), brcl::DomainError);
  EXPECT_THROW(brcl::sample_poisson(10.0, -1.0, rng), brcl::DomainError);
}

TEST(Poisson, WindowAndDeterminism) {
  brcl::Rng r1(3), r2(3);
  const auto a = brcl::sample_poisson(500, 0.1, r1);
  const auto b = brcl::sample_poisson(500, 0.1, r2);
  EXPECT_EQ(a.points, b.points);
  EXPECT_DOUBLE_EQ(a.window.xmin, -0.6);
  EXPECT_DOUBLE_EQ(a.window.ymax, 0.6);
  for (const auto& p : a.points) EXPECT_TRUE(a.window.contains(p));
}

TEST(Poisson, CountDispersion) {
  const int reps = 400;
  std::vector<double> counts;
  for (int r = 0; r < reps; ++r) {
    auto rng = brcl::make_stream(42, r, brcl::StreamPurpose::kSites);
    counts.push_back(static_cast<double>(brcl::sample_poisson(1000, 0.0, rng).points.size()));
  }
  const double m = brcl::stats::mean(counts);
  EXPECT_NEAR(m, 1000.0, 3.0 * std::sqrt(1000.0 / reps));
  double chi = 0.0;
  for (double c : counts) chi += (c - 1000.0) * (c - 1000.0) / 1000.0;
  boost::math::chi_squared dist(reps);
  EXPECT_GT(chi, boost::math::quantile(dist, 0.001));
  EXPECT_LT(chi, boost::math::quantile(dist, 0.999));
}

TEST(Poisson, PositionsUniform) {
  brcl::Rng rng(9);
  const auto pat = brcl::sample_poisson(5000, 0.0, rng);
  std::vector<double> xs, ys;
  for (const auto& p : pat.points) xs.push_back(p.x), ys.push_back(p.y);
  auto cdf = [](double v) { return std::clamp(v + 0.5, 0.0, 1.0); };
  EXPECT_GT(brcl::stats::ks_test(xs, cdf).p_value, 0.001);
  EXPECT_GT(brcl::stats::ks_test(ys, cdf).p_value, 0.001);
}

TEST(Poisson, DefaultMargin) {
  EXPECT_NEAR(brcl::default_margin(1024), 3.0 * std::log(1024.0) / 32.0, 1e-15);
  EXPECT_EQ(brcl::default_margin(1.0), 0.0);
}

TEST(EdgeTriangleSets, Intensities) {
  const double n = 2000;
  std::vector<double> e_ratio, t_ratio;
  for (int r = 0; r < 20; ++r) {
    auto rng = brcl::make_stream(5, r, brcl::StreamPurpose::kSites);
    const auto pat = brcl::sample_poisson(n, brcl::default_margin(n), rng);
    const auto tri = brcl::delaunay(pat);
    e_ratio.push_back(static_cast<double>(brcl::edge_set(tri).size()) / n);
    const auto ts = brcl::triangle_set(tri);
    EXPECT_EQ(ts.excluded_degenerate, 0u);
    t_ratio.push_back(static_cast<double>(ts.size()) / n);
  }
  EXPECT_NEAR(brcl::stats::mean(e_ratio), 3.0, 0.09);
  EXPECT_NEAR(brcl::stats::mean(t_ratio), 2.0, 0.06);
}

TEST(EdgeTriangleSets, SubsetsAndOrdering) {
  brcl::Rng rng(21);
  const auto pat = brcl::sample_poisson(500, brcl::default_margin(500), rng);
  const auto tri = brcl::delaunay(pat);
  const auto& v = tri.vertices;
  const std::set<std::pair<int, int>> all_edges(tri.edges.begin(), tri.edges.end());
  std::set<std::array<int, 3>> all_tris;
  for (auto t : tri.triangles) {
    std::sort(t.begin(), t.end());
    all_tris.insert(t);
  }
  const auto es = brcl::edge_set(tri);
  std::set<std::array<int, 2>> seen;
  for (const auto& e : es.pairs) {
    EXPECT_TRUE(all_edges.count({std::min(e[0], e[1]), std::max(e[0], e[1])}));
    EXPECT_TRUE(brcl::in_unit_cell(v[e[0]]));
    EXPECT_TRUE(v[e[0]] < v[e[1]]);
    EXPECT_TRUE(seen.insert(e).second);
  }
  for (const auto& t : brcl::triangle_set(tri).triples) {
    auto s = t;
    std::sort(s.begin(), s.end());
    EXPECT_TRUE(all_tris.count(s));
    EXPECT_TRUE(brcl::in_unit_cell(v[t[0]]));
    EXPECT_TRUE(v[t[0]] < v[t[1]] && v[t[1]] < v[t[2]]);
  }
}

TEST(EdgeTriangleSets, MinAngleFilter) {
  const std::vector<Point> pts = {{0, 0}, {0.4, 0}, {0.2, 1e-9}, {0.2, 0.3}};
  const auto tri = brcl::delaunay(pts);
  const auto ts = brcl::triangle_set(tri);
  EXPECT_EQ(ts.excluded_degenerate, 1u);
  EXPECT_EQ(ts.size(), tri.triangles.size() - 1);
}

TEST(EdgeTriangleSets, CsvExport) {
  const std::vector<Point> sq = {{0, 0}, {0.25, 0}, {0, 0.25}, {0.25, 0.25}};
  const auto tri = brcl::delaunay(sq);
  std::ostringstream vs, es, ts;
  brcl::write_vertices_csv(vs, tri);
  brcl::write_edges_csv(es, brcl::edge_set(tri));
  brcl::write_triangles_csv(ts, brcl::triangle_set(tri));
  EXPECT_EQ(vs.str().substr(0, 7), "id,x,y\n");
  const std::string e = es.str(), t = ts.str();
  EXPECT_EQ(std::count(e.begin(), e.end(), '\n'), 6);
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 3);
}

TEST(EdgeTriangleSets, UsedVertices) {
  brcl::Rng rng(8);
  const auto pat = brcl::sample_poisson(300, brcl::default_margin(300), rng);
  const auto tri = brcl::delaunay(pat);
  const auto ids = brcl::used_vertices(brcl::edge_set(tri), brcl::triangle_set(tri));
  EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
  for (std::size_t i = 0; i < pat.points.size(); ++i)
    if (brcl::in_unit_cell(pat.points[i])) EXPECT_TRUE(std::binary_search(ids.begin(), ids.end(), static_cast<int>(i)));
}

TEST(EdgeTriangleSets, MaxEdgeLengthScaling) {
  std::vector<double> logn, logmax;
  for (int k = 8; k <= 13; ++k) {
    const double n = std::ldexp(1.0, k);
    for (int r = 0; r < 4; ++r) {
      auto rng = brcl::make_stream(77, 100 * k + r, brcl::StreamPurpose::kSites);
      const auto pat = brcl::sample_poisson(n, brcl::default_margin(n), rng);
      const auto tri = brcl::delaunay(pat);
      double mx = 0;
      for (const auto& e : brcl::edge_set(tri).pairs) mx = std::max(mx, brcl::distance(tri.vertices[e[0]], tri.vertices[e[1]]));
      logn.push_back(std::log(n));
      logmax.push_back(std::log(mx * std::sqrt(n) / std::log(n)));
    }
  }
  // Normalized by log(N)/sqrt(N) the maximum stays bounded.
  const auto fit = brcl::stats::linear_fit(logn, logmax);
  EXPECT_LT(std::abs(fit.slope), 0.15);
}

TEST(EdgeTriangleSets, PowerSumScaling) {
  const double alpha = 0.5;
  std::vector<double> logn, logs;
  for (int k = 8; k <= 13; ++k) {
    const double n = std::ldexp(1.0, k);
    double s = 0.0;
    const int reps = 4;
    for (int r = 0; r < reps; ++r) {
      auto rng = brcl::make_stream(99, 100 * k + r, brcl::StreamPurpose::kSites);
      const auto pat = brcl::sample_poisson(n, brcl::default_margin(n), rng);
      const auto tri = brcl::delaunay(pat);
      for (const auto& e : brcl::edge_set(tri).pairs) s += std::pow(brcl::distance(tri.vertices[e[0]], tri.vertices[e[1]]), alpha);
    }
    logn.push_back(std::log(n));
    logs.push_back(std::log(s / reps));
  }
  EXPECT_NEAR(brcl::stats::linear_fit(logn, logs).slope, 1.0 - alpha / 2.0, 0.05);
}

TEST(TypicalCell, MeanAreaAndRadius) {
  brcl::Rng rng(2024);
  brcl::TypicalCellSampler s;
  std::vector<double> area, r2;
  for (int i = 0; i < 100000; ++i) {
    const auto c = s.sample(rng);
    area.push_back(c.area());
    r2.push_back(brcl::kPi * c.radius * c.radius);
    for (const auto& v : c.vertices) ASSERT_NEAR(brcl::norm(v), c.radius, 1e-12 * (1 + c.radius));
  }
  EXPECT_NEAR(brcl::stats::mean(area), 0.5, 3.0 * brcl::stats::standard_error(area));
  auto gamma2 = [](double x) { return x <= 0 ? 0.0 : 1.0 - (1.0 + x) * std::exp(-x); };
  EXPECT_GT(brcl::stats::ks_test(r2, gamma2).p_value, 0.001);
  // Acceptance rate E[a]/max a with E[a] = 3/(2 pi) for a uniform inscribed triangle.
  const double expected = 3.0 / (2.0 * brcl::kPi) / brcl::TypicalCellSampler::kMaxUnitArea;
  const double p = s.acceptance_rate();
  EXPECT_NEAR(p, expected, 4.0 * std::sqrt(p * (1 - p) / s.proposals()));
}

TEST(TypicalEdge, Boundaries) {
  EXPECT_EQ(brcl::typical_edge_cdf(0.0), 0.0);
  EXPECT_NEAR(brcl::typical_edge_cdf(10.0), 1.0, 1e-6);
  EXPECT_EQ(brcl::typical_edge_cdf(INFINITY), 1.0);
  EXPECT_THROW(brcl::typical_edge_cdf(-0.1), brcl::DomainError);
  double prev = 0.0;
  for (double l = 0.05; l < 4.0; l += 0.05) {
    const double f = brcl::typical_edge_cdf(l);
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(TypicalEdge, MatchesTwoAngleIntegral) {
  // Brute force over two of the three cell angles (the third fixed by rotation).
  using boost::math::quadrature::gauss_kronrod;
  auto oracle = [](double ell) {
    auto outer = [ell](double t2) {
      const double s = std::sin(0.5 * t2);
      const double x = brcl::kPi * ell * ell / (4.0 * s * s);
      const double g = s == 0.0 ? 0.0 : 1.0 - (1.0 + x) * std::exp(-x);
      auto inner = [t2](double t3) { return 0.5 * std::abs(std::sin(t2) + std::sin(t3 - t2) - std::sin(t3)); };
      const double a = gauss_kronrod<double, 31>::integrate(inner, 0.0, t2, 10, 1e-12) +
                       gauss_kronrod<double, 31>::integrate(inner, t2, 2.0 * brcl::kPi, 10, 1e-12);
      return a * g;
    };
    return gauss_kronrod<double, 31>::integrate(outer, 0.0, 2.0 * brcl::kPi, 12, 1e-11) / (6.0 * brcl::kPi);
  };
  for (double ell : {0.1, 0.4, 0.8, 1.2, 2.0}) EXPECT_NEAR(brcl::typical_edge_cdf(ell), oracle(ell), 1e-8) << ell;
}

TEST(TypicalEdge, MeanLength) {
  auto tail = [](double l) { return 1.0 - brcl::typical_edge_cdf(l); };
  const double m = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(tail, 0.0, 8.0, 12, 1e-11);
  EXPECT_NEAR(m, 32.0 / (9.0 * brcl::kPi), 1e-7);
}

TEST(TypicalEdge, MatchesDelaunayEdges) {
  // Unit-intensity lengths via the sqrt(N) rescaling.
  const double n = 3400;
  auto rng = brcl::make_stream(31, 0, brcl::StreamPurpose::kSites);
  const auto pat = brcl::sample_poisson(n, brcl::default_margin(n), rng);
  const auto tri = brcl::delaunay(pat);
  std::vector<double> len;
  for (const auto& e : brcl::edge_set(tri).pairs) len.push_back(std::sqrt(n) * brcl::distance(tri.vertices[e[0]], tri.vertices[e[1]]));
  ASSERT_GT(len.size(), 9000u);
  EXPECT_GT(brcl::stats::ks_test(len, [](double l) { return brcl::typical_edge_cdf(l); }).p_value, 0.01);
}

TEST(TypicalEdge, MatchesTypicalCellSampler) {
  brcl::Rng rng(606);
  std::vector<double> len;
  for (int i = 0; i < 20000; ++i) {
    const auto c = brcl::sample_typical_cell(rng);
    len.push_back(brcl::distance(c.vertices[0], c.vertices[1]));
  }
  EXPECT_GT(brcl::stats::ks_test(len, [](double l) { return brcl::typical_edge_cdf(l); }).p_value, 0.01);
}
