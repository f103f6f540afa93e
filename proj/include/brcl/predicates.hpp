// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Orientation and in-circle predicates. A floating-point evaluation is used
// when Shewchuk's static error bound certifies its sign; otherwise the
// determinant is recomputed exactly over the rationals.

#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "brcl/core.hpp"

namespace brcl::predicates {

namespace detail {

using Exact = boost::multiprecision::cpp_rational;

inline constexpr double kEps = 0x1.0p-53;
inline constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
inline constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

inline int sign_of(const Exact& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

inline int orient_exact(const Point& a, const Point& b, const Point& c) {
  const Exact ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  return sign_of((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
}

inline int incircle_exact(const Point& a, const Point& b, const Point& c, const Point& d) {
  const Exact dx(d.x), dy(d.y);
  const Exact adx = Exact(a.x) - dx, ady = Exact(a.y) - dy;
  const Exact bdx = Exact(b.x) - dx, bdy = Exact(b.y) - dy;
  const Exact cdx = Exact(c.x) - dx, cdy = Exact(c.y) - dy;
  const Exact alift = adx * adx + ady * ady;
  const Exact blift = bdx * bdx + bdy * bdy;
  const Exact clift = cdx * cdx + cdy * cdy;
  const Exact det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) + clift * (adx * bdy - bdx * ady);
  return sign_of(det);
}

}  // namespace detail

//! +1 if (a, b, c) turns counter-clockwise, -1 if clockwise, 0 if collinear.
inline int orient(const Point& a, const Point& b, const Point& c) {
  const double detleft = (b.x - a.x) * (c.y - a.y);
  const double detright = (b.y - a.y) * (c.x - a.x);
  const double det = detleft - detright;
  const double bound = detail::kOrientBound * (std::abs(detleft) + std::abs(detright));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::orient_exact(a, b, c);
}

//! For counter-clockwise (a, b, c): +1 if d lies strictly inside their
//! circumcircle, -1 if strictly outside, 0 if cocircular.
inline int incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = detail::kIncircleBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::incircle_exact(a, b, c, d);
}

//! Point c + k * dir in the limit k -> infinity; dir = (0, 0) for an ordinary point.
struct SymbolicPoint {
  Point base;
  Point dir;
};

namespace detail {

// Polynomial in k with exact coefficients, degree <= 4.
struct Poly {
  std::array<Exact, 5> c{};

  static Poly of(double base, double dir) {
    Poly p;
    p.c[0] = Exact(base);
    p.c[1] = Exact(dir);
    return p;
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    Poly r;
    for (int i = 0; i < 5; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
  }
  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    for (int i = 0; i < 5; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (int i = 0; i < 5; ++i) {
      if (a.c[i] == 0) continue;
      for (int j = 0; i + j < 5; ++j)
        if (b.c[j] != 0) r.c[i + j] += a.c[i] * b.c[j];
    }
    return r;
  }
  int leading_sign() const {
    for (int i = 4; i >= 0; --i)
      if (int s = sign_of(c[i]); s != 0) return s;
    return 0;
  }
};

}  // namespace detail

//! orient() for points that may lie at infinity; sign of the limit as k grows.
inline int orient(const SymbolicPoint& a, const SymbolicPoint& b, const SymbolicPoint& c) {
  using detail::Poly;
  const Poly bx = Poly::of(b.base.x, b.dir.x) - Poly::of(a.base.x, a.dir.x);
  const Poly by = Poly::of(b.base.y, b.dir.y) - Poly::of(a.base.y, a.dir.y);
  const Poly cx = Poly::of(c.base.x, c.dir.x) - Poly::of(a.base.x, a.dir.x);
  const Poly cy = Poly::of(c.base.y, c.dir.y) - Poly::of(a.base.y, a.dir.y);
  return (bx * cy - by * cx).leading_sign();
}

//! incircle() for points that may lie at infinity; sign of the limit as k grows.
inline int incircle(const SymbolicPoint& a, const SymbolicPoint& b, const SymbolicPoint& c, const SymbolicPoint& d) {
  using detail::Poly;
  const Poly dx = Poly::of(d.base.x, d.dir.x), dy = Poly::of(d.base.y, d.dir.y);
  const Poly adx = Poly::of(a.base.x, a.dir.x) - dx, ady = Poly::of(a.base.y, a.dir.y) - dy;
  const Poly bdx = Poly::of(b.base.x, b.dir.x) - dx, bdy = Poly::of(b.base.y, b.dir.y) - dy;
  const Poly cdx = Poly::of(c.base.x, c.dir.x) - dx, cdy = Poly::of(c.base.y, c.dir.y) - dy;
  const Poly alift = adx * adx + ady * ady;
  const Poly blift = bdx * bdx + bdy * bdy;
  const Poly clift = cdx * cdx + cdy * cdy;
  const Poly det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) + clift * (adx * bdy - bdx * ady);
  return det.leading_sign();
}

}  // namespace brcl::predicates
