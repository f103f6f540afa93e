// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Incremental Bowyer-Watson Delaunay triangulation with walking point
// location. Points are inserted along a Hilbert curve; the result depends
// only on the input coordinates and their order.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "brcl/core.hpp"
#include "brcl/predicates.hpp"

namespace brcl {

struct Triangulation {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  //!< counter-clockwise vertex ids
  std::vector<std::pair<int, int>> edges;     //!< unique, first < second
  std::vector<Point> circumcenters;           //!< per triangle

  std::size_t vertex_count() const { return vertices.size(); }
};

inline Point circumcenter(const Point& a, const Point& b, const Point& c) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

namespace detail {

inline std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int order) {
  const std::uint32_t n = 1u << order;
  std::uint64_t d = 0;
  for (std::uint32_t s = n >> 1; s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) ? 1u : 0u;
    const std::uint32_t ry = (y & s) ? 1u : 0u;
    d += static_cast<std::uint64_t>(s) * s * ((3u * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

inline std::vector<int> hilbert_order(const std::vector<Point>& pts) {
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
  constexpr int kOrder = 16;
  constexpr double kCells = 65535.0;
  std::vector<std::pair<std::uint64_t, int>> keyed(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto qx = static_cast<std::uint32_t>((pts[i].x - xmin) / span * kCells);
    const auto qy = static_cast<std::uint32_t>((pts[i].y - ymin) / span * kCells);
    keyed[i] = {hilbert_index(qx, qy, kOrder), static_cast<int>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> order(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) order[i] = keyed[i].second;
  return order;
}

class BowyerWatson {
 public:
  explicit BowyerWatson(const std::vector<Point>& input) : n_(static_cast<int>(input.size())) {
    pts_ = input;
    double xmin = input[0].x, xmax = input[0].x, ymin = input[0].y, ymax = input[0].y;
    for (const auto& p : input) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    center_ = {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
    // Three vertices at infinity; only their directions matter.
    pts_.push_back(center_);
    pts_.push_back(center_);
    pts_.push_back(center_);
    tris_.push_back({{n_, n_ + 1, n_ + 2}, {-1, -1, -1}, true});
  }

  void insert_all() {
    for (int v : hilbert_order(std::vector<Point>(pts_.begin(), pts_.begin() + n_))) insert(v);
  }

  Triangulation result() const {
    Triangulation out;
    out.vertices.assign(pts_.begin(), pts_.begin() + n_);
    for (const auto& t : tris_) {
      if (!t.alive || t.v[0] >= n_ || t.v[1] >= n_ || t.v[2] >= n_) continue;
      out.triangles.push_back(t.v);
    }
    std::sort(out.triangles.begin(), out.triangles.end());
    for (const auto& t : out.triangles) {
      out.circumcenters.push_back(circumcenter(pts_[t[0]], pts_[t[1]], pts_[t[2]]));
      for (int i = 0; i < 3; ++i) {
        const int a = t[i], b = t[(i + 1) % 3];
        out.edges.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // nb[i] lies across the edge opposite v[i]
    bool alive;
  };

  predicates::SymbolicPoint sym(int v) const {
    static constexpr std::array<Point, 3> kDirs = {{{-1.0, -1.0}, {1.0, -1.0}, {0.0, 1.0}}};
    if (v < n_) return {pts_[static_cast<std::size_t>(v)], {0.0, 0.0}};
    return {center_, kDirs[static_cast<std::size_t>(v - n_)]};
  }

  int orient(int a, int b, int c) const {
    if (a < n_ && b < n_ && c < n_)
      return predicates::orient(pts_[static_cast<std::size_t>(a)], pts_[static_cast<std::size_t>(b)],
                                pts_[static_cast<std::size_t>(c)]);
    const int supers = (a >= n_) + (b >= n_) + (c >= n_);
    if (supers == 2) {
      // Rotate to (S, T, r): the k^2 term is dir(S) x dir(T).
      std::array<int, 3> t = {a, b, c};
      while (t[2] >= n_) std::rotate(t.begin(), t.begin() + 1, t.end());
      const Point s = sym(t[0]).dir, u = sym(t[1]).dir;
      return s.x * u.y - s.y * u.x > 0 ? 1 : -1;
    }
    if (supers == 1) {
      // Rotate to (S, q, r): the k-linear term is -dir x (r - q).
      std::array<int, 3> t = {a, b, c};
      while (t[0] < n_) std::rotate(t.begin(), t.begin() + 1, t.end());
      const Point s = sym(t[0]).dir;
      const Point& q = pts_[static_cast<std::size_t>(t[1])];
      const Point& r = pts_[static_cast<std::size_t>(t[2])];
      const double dx = r.x - q.x, dy = r.y - q.y;
      const double val = s.y * dx - s.x * dy;
      const double bound = 4.0 * predicates::detail::kEps * (std::abs(dx) + std::abs(dy));
      if (val > bound) return 1;
      if (-val > bound) return -1;
    }
    return predicates::orient(sym(a), sym(b), sym(c));
  }

  int incircle(const std::array<int, 3>& t, int d) const {
    if (t[0] < n_ && t[1] < n_ && t[2] < n_)
      return predicates::incircle(pts_[static_cast<std::size_t>(t[0])], pts_[static_cast<std::size_t>(t[1])],
                                  pts_[static_cast<std::size_t>(t[2])], pts_[static_cast<std::size_t>(d)]);
    const int supers = (t[0] >= n_) + (t[1] >= n_) + (t[2] >= n_);
    if (supers == 1 && d < n_) {
      // The circumdisk of (a, b, S) tends to the open half-plane left of ab.
      int r = 0;
      while (t[static_cast<std::size_t>(r)] < n_) ++r;
      const int a = t[static_cast<std::size_t>((r + 1) % 3)], b = t[static_cast<std::size_t>((r + 2) % 3)];
      if (const int o = orient(a, b, d); o != 0) return o;
    } else if (supers == 2 && d < n_) {
      // Leading k^3 coefficient is linear in a - d.
      std::array<int, 3> r = t;
      while (r[0] >= n_) std::rotate(r.begin(), r.begin() + 1, r.end());
      static constexpr double kLead[3][2] = {{0.0, 4.0}, {-3.0, -1.0}, {3.0, -1.0}};
      const auto* w = kLead[r[1] - n_];
      const Point& a = pts_[static_cast<std::size_t>(r[0])];
      const Point& p = pts_[static_cast<std::size_t>(d)];
      const double ex = a.x - p.x, ey = a.y - p.y;
      const double val = w[0] * ex + w[1] * ey;
      const double bound = 8.0 * predicates::detail::kEps * (std::abs(w[0] * ex) + std::abs(w[1] * ey));
      if (val > bound) return 1;
      if (-val > bound) return -1;
    }
    return predicates::incircle(sym(t[0]), sym(t[1]), sym(t[2]), sym(d));
  }

  int locate(int v) const {
    int t = last_;
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tri = tris_[static_cast<std::size_t>(t)];
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        if (orient(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], v) < 0) {
          next = tri.nb[i];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    throw NumericalError("delaunay: point location did not terminate");
  }

  void insert(int v) {
    const int start = locate(v);

    bad_.clear();
    bad_.push_back(start);
    mark_[static_cast<std::size_t>(start)] = stamp_ + 1;
    for (std::size_t k = 0; k < bad_.size(); ++k) {
      const Tri& tri = tris_[static_cast<std::size_t>(bad_[k])];
      for (int i = 0; i < 3; ++i) {
        const int nb = tri.nb[i];
        if (nb < 0 || mark_[static_cast<std::size_t>(nb)] > stamp_) continue;
        const Tri& other = tris_[static_cast<std::size_t>(nb)];
        if (incircle(other.v, v) > 0) {
          mark_[static_cast<std::size_t>(nb)] = stamp_ + 1;
          bad_.push_back(nb);
        } else {
          mark_[static_cast<std::size_t>(nb)] = stamp_ + 2;  // checked, good
        }
      }
    }

    // Cavity boundary, oriented counter-clockwise as seen from inside.
    boundary_.clear();
    for (int t : bad_) {
      const Tri& tri = tris_[static_cast<std::size_t>(t)];
      for (int i = 0; i < 3; ++i) {
        const int nb = tri.nb[i];
        if (nb >= 0 && mark_[static_cast<std::size_t>(nb)] == stamp_ + 1) continue;
        boundary_.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], nb});
      }
    }
    stamp_ += 2;

    for (int t : bad_) {
      tris_[static_cast<std::size_t>(t)].alive = false;
      free_.push_back(t);
    }

    created_.clear();
    for (const auto& e : boundary_) {
      const int id = allocate({{e.a, e.b, v}, {-1, -1, e.outside}, true});
      created_.push_back(id);
      if (e.outside >= 0) {
        Tri& o = tris_[static_cast<std::size_t>(e.outside)];
        for (int i = 0; i < 3; ++i) {
          const int oa = o.v[(i + 1) % 3], ob = o.v[(i + 2) % 3];
          if (oa == e.b && ob == e.a) o.nb[i] = id;
        }
      }
    }
    // Link the fan: triangle (a, b, v) meets (b, c, v) across (b, v) and
    // (z, a, v) across (v, a).
    for (std::size_t i = 0; i < created_.size(); ++i) {
      Tri& t = tris_[static_cast<std::size_t>(created_[i])];
      for (std::size_t j = 0; j < created_.size(); ++j) {
        if (i == j) continue;
        const Tri& u = tris_[static_cast<std::size_t>(created_[j])];
        if (u.v[0] == t.v[1]) t.nb[0] = created_[j];
        if (u.v[1] == t.v[0]) t.nb[1] = created_[j];
      }
    }
    last_ = created_.front();
  }

  int allocate(const Tri& t) {
    if (!free_.empty()) {
      const int id = free_.back();
      free_.pop_back();
      tris_[static_cast<std::size_t>(id)] = t;
      return id;
    }
    tris_.push_back(t);
    mark_.push_back(0);
    return static_cast<int>(tris_.size() - 1);
  }

  int n_;
  Point center_;
  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  std::vector<std::uint64_t> mark_ = {0};
  std::uint64_t stamp_ = 0;
  std::vector<int> free_;
  std::vector<int> bad_;
  struct Boundary {
    int a, b, outside;
  };
  std::vector<Boundary> boundary_;
  std::vector<int> created_;
  int last_ = 0;
};

}  // namespace detail

//! Delaunay triangulation of at least three non-collinear, distinct points.
//! Cocircular ties are resolved by insertion order: a point on a
//! circumcircle does not break that triangle.
inline Triangulation delaunay(const std::vector<Point>& points) {
  if (points.size() < 3) throw DegenerateInputError("delaunay: need at least 3 points");
  for (const auto& p : points)
    if (!is_finite(p)) throw DegenerateInputError("delaunay: non-finite coordinate");
  {
    std::vector<Point> sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) { return a < b; });
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw DegenerateInputError("delaunay: duplicate points");
  }
  bool collinear = true;
  for (std::size_t i = 2; i < points.size() && collinear; ++i)
    collinear = predicates::orient(points[0], points[1], points[i]) == 0;
  if (collinear) throw DegenerateInputError("delaunay: all points collinear");

  detail::BowyerWatson bw(points);
  bw.insert_all();
  return bw.result();
}

}  // namespace brcl
