// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Bivariate and trivariate Brown-Resnick exponent functions and densities,
// the Delaunay-tapered composite log-likelihoods, and the small-distance
// limits of the scores.
//
// Every function is templated on a kernel policy (see GaussianKernels) that
// supplies phi, Phi, log Phi and the bivariate normal pieces.

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <vector>

#include "brcl/core.hpp"
#include "brcl/fields.hpp"
#include "brcl/gaussian.hpp"
#include "brcl/geometry.hpp"

namespace brcl {

struct PairGeometry {
  double d = 0.0;
  double a = 0.0;  //!< sigma * d^(alpha/2)

  static PairGeometry from_scale(double a) {
    detail::require_positive(a, "PairGeometry: a");
    return {std::numeric_limits<double>::quiet_NaN(), a};
  }
  PairGeometry() = default;
  PairGeometry(double distance, const FieldParams& params) : d(distance) {
    detail::require_positive(distance, "PairGeometry: distance");
    a = params.increment_scale(distance);
  }

 private:
  PairGeometry(double dd, double aa) : d(dd), a(aa) {}
};

struct TripleGeometry {
  double d12 = 0, d13 = 0, d23 = 0;
  double a12 = 0, a13 = 0, a23 = 0;
  Correlation r1, r2, r3;  //!< at sites 1, 2, 3

  TripleGeometry() = default;
  TripleGeometry(double d12_, double d13_, double d23_, const FieldParams& params)
      : d12(d12_), d13(d13_), d23(d23_) {
    detail::require_positive(d12, "TripleGeometry: d12");
    detail::require_positive(d13, "TripleGeometry: d13");
    detail::require_positive(d23, "TripleGeometry: d23");
    const double slack = 1e-12 * std::max({d12, d13, d23});
    if (d12 > d13 + d23 + slack || d13 > d12 + d23 + slack || d23 > d12 + d13 + slack)
      throw DomainError("TripleGeometry: distances violate the triangle inequality");
    a12 = params.increment_scale(d12);
    a13 = params.increment_scale(d13);
    a23 = params.increment_scale(d23);
    const double al = params.alpha();
    const double p12 = std::pow(d12, al), p13 = std::pow(d13, al), p23 = std::pow(d23, al);
    r1 = Correlation((p12 + p13 - p23) / (2.0 * std::sqrt(p12 * p13)));
    r2 = Correlation((p12 + p23 - p13) / (2.0 * std::sqrt(p12 * p23)));
    r3 = Correlation((p13 + p23 - p12) / (2.0 * std::sqrt(p13 * p23)));
  }
  TripleGeometry(const Point& x1, const Point& x2, const Point& x3, const FieldParams& params)
      : TripleGeometry(distance(x1, x2), distance(x1, x3), distance(x2, x3), params) {}

  bool is_degenerate() const { return r1.is_singular() || r2.is_singular() || r3.is_singular(); }
};

namespace detail {

inline void require_positive_z(double z, const char* what) {
  if (!(z > 0.0) || std::isnan(z)) throw DomainError(std::string(what) + ": z must be > 0");
}

// Sum in a fixed binary tree so the result depends only on the order of terms.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t h = x.size() / 2;
  return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

inline double log_add_exp(double x, double y) {
  if (x == -INFINITY) return y;
  if (y == -INFINITY) return x;
  const double m = std::max(x, y);
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pairs.

//! V(z1, z2) = Phi(v(u))/z1 + Phi(v(-u))/z2 with u = log(z2/z1)/a, v(u) = a/2 + u.
template <class K = GaussianKernels>
double pair_exponent(double z1, double z2, const PairGeometry& g) {
  detail::require_positive_z(z1, "pair_exponent");
  if (z2 == INFINITY) return 1.0 / z1;
  detail::require_positive_z(z2, "pair_exponent");
  const double u = std::log(z2 / z1) / g.a;
  return K::cdf(0.5 * g.a + u) / z1 + K::cdf(0.5 * g.a - u) / z2;
}

//! A(u), B(u), C(u) evaluated term by term as in the density display.
struct PairTerms {
  double A = 0, B = 0, C = 0;
};

template <class K = GaussianKernels>
PairTerms pair_terms(double u, double a) {
  const double vp = 0.5 * a + u, vm = 0.5 * a - u;
  PairTerms t;
  t.A = K::cdf(vp) + K::pdf(vp) / a - std::exp(-a * u) * K::pdf(vm) / a;
  t.B = K::cdf(vm) + K::pdf(vm) / a - std::exp(a * u) * K::pdf(vp) / a;
  t.C = std::exp(-a * u) * (vm * K::pdf(vp) + std::exp(-a * u) * vp * K::pdf(vm)) / (a * a);
  return t;
}

//! log f(z1, z2) = -V + log(z1^-4 e^{-2au} A B + z1^-3 C), evaluated with
//! A = Phi(v(u)), B = Phi(v(-u)), C = e^{-au} phi(v(u)) / a.
template <class K = GaussianKernels>
double pair_log_density(double z1, double z2, const PairGeometry& g) {
  detail::require_positive_z(z1, "pair_log_density");
  detail::require_positive_z(z2, "pair_log_density");
  const double a = g.a;
  const double lz1 = std::log(z1), lz2 = std::log(z2);
  const double u = (lz2 - lz1) / a;
  const double vp = 0.5 * a + u, vm = 0.5 * a - u;
  const double v = K::cdf(vp) / z1 + K::cdf(vm) / z2;
  // z1^-4 e^{-2au} = z1^-2 z2^-2 and z1^-3 e^{-au} = z1^-2 z2^-1.
  const double t1 = K::log_cdf(vp) + K::log_cdf(vm) - lz2;
  const double t2 = -0.5 * vp * vp - 0.91893853320467274178 - std::log(a);
  return -v - 2.0 * lz1 - lz2 + detail::log_add_exp(t1, t2);
}

template <class K = GaussianKernels>
double pair_density(double z1, double z2, const PairGeometry& g) {
  return std::exp(pair_log_density<K>(z1, z2, g));
}

// ---------------------------------------------------------------------------
// Triples.

struct TripleExponentPartials {
  double v = 0;
  std::array<double, 3> first{};  //!< V_1, V_2, V_3
  double v12 = 0, v13 = 0, v23 = 0;
  double v123 = 0;
};

namespace detail {

// One Phi_2 term of the triple exponent: e^{-t_m} F(h, k) with h, k affine in
// t = log z; dh/dt = p, dk/dt = q.
struct TripleTerm {
  int m;
  double h, k;
  std::array<double, 3> p, q;
  Correlation r;
};

inline std::array<TripleTerm, 3> triple_terms(double z1, double z2, double z3, const TripleGeometry& g) {
  const double t1 = std::log(z1), t2 = std::log(z2), t3 = std::log(z3);
  const double i12 = 1.0 / g.a12, i13 = 1.0 / g.a13, i23 = 1.0 / g.a23;
  return {{
      {0, 0.5 * g.a12 + (t2 - t1) * i12, 0.5 * g.a13 + (t3 - t1) * i13, {-i12, i12, 0.0}, {-i13, 0.0, i13}, g.r1},
      {1, 0.5 * g.a12 + (t1 - t2) * i12, 0.5 * g.a23 + (t3 - t2) * i23, {i12, -i12, 0.0}, {0.0, -i23, i23}, g.r2},
      {2, 0.5 * g.a13 + (t1 - t3) * i13, 0.5 * g.a23 + (t2 - t3) * i23, {i13, 0.0, -i13}, {0.0, i23, -i23}, g.r3},
  }};
}

}  // namespace detail

//! Sum over sites m of Phi_2(h_m, k_m; R_m) / z_m.
template <class K = GaussianKernels>
double triple_exponent(double z1, double z2, double z3, const TripleGeometry& g) {
  detail::require_positive_z(z1, "triple_exponent");
  detail::require_positive_z(z2, "triple_exponent");
  detail::require_positive_z(z3, "triple_exponent");
  const std::array<double, 3> z = {z1, z2, z3};
  double v = 0.0;
  for (const auto& t : detail::triple_terms(z1, z2, z3, g)) v += K::bvn_cdf(t.h, t.k, t.r) / z[t.m];
  return v;
}

//! Exponent with log-scale partials: g_i = z_i V_i, g_ij = z_i z_j V_ij,
//! g_123 = z_1 z_2 z_3 V_123.
struct TripleLogPartials {
  double v = 0;
  std::array<double, 3> g{};
  double g12 = 0, g13 = 0, g23 = 0, g123 = 0;
};

template <class K = GaussianKernels>
TripleLogPartials triple_log_partials(double z1, double z2, double z3, const TripleGeometry& g) {
  detail::require_positive_z(z1, "triple_exponent_partials");
  detail::require_positive_z(z2, "triple_exponent_partials");
  detail::require_positive_z(z3, "triple_exponent_partials");
  if (g.is_degenerate()) throw DegenerateInputError("triple_exponent_partials: collinear sites (|R| = 1)");
  const std::array<double, 3> z = {z1, z2, z3};
  TripleLogPartials out;
  for (const auto& t : detail::triple_terms(z1, z2, z3, g)) {
    const double h = t.h, k = t.k, r = t.r.value();
    const double s2 = (1.0 - r) * (1.0 + r);
    const double f = K::bvn_cdf(h, k, t.r);
    const double fh = K::bvn_cdf_dh(h, k, t.r);
    const double fk = K::bvn_cdf_dh(k, h, t.r);
    const double f2 = K::bvn_pdf(h, k, t.r);
    const double fhh = -h * fh - r * f2;
    const double fkk = -k * fk - r * f2;
    const double fhhk = -h * f2 + r * f2 * (k - r * h) / s2;
    const double fhkk = -k * f2 + r * f2 * (h - r * k) / s2;
    const double fhhh = -fh - h * fhh + r * f2 * (h - r * k) / s2;
    const double fkkk = -fk - k * fkk + r * f2 * (k - r * h) / s2;
    // Derivative table d[a][b] = d^{a+b} F / dh^a dk^b.
    double d[4][4] = {};
    d[0][0] = f;
    d[1][0] = fh;
    d[0][1] = fk;
    d[1][1] = f2;
    d[2][0] = fhh;
    d[0][2] = fkk;
    d[2][1] = fhhk;
    d[1][2] = fhkk;
    d[3][0] = fhhh;
    d[0][3] = fkkk;
    // d/dt_i acts on F as c_i + p_i D_h + q_i D_k, with c_i = -[i == m].
    std::array<std::array<double, 3>, 3> op{};
    for (int i = 0; i < 3; ++i) op[i] = {i == t.m ? -1.0 : 0.0, t.p[i], t.q[i]};
    static constexpr int kH[3] = {0, 1, 0};
    static constexpr int kK[3] = {0, 0, 1};
    const double scale = 1.0 / z[t.m];
    out.v += scale * f;
    for (int i = 0; i < 3; ++i) {
      double s = 0.0;
      for (int x = 0; x < 3; ++x) s += op[i][x] * d[kH[x]][kK[x]];
      out.g[i] += scale * s;
    }
    auto second = [&](int i, int j) {
      double s = 0.0;
      for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) s += op[i][x] * op[j][y] * d[kH[x] + kH[y]][kK[x] + kK[y]];
      return scale * s;
    };
    out.g12 += second(0, 1);
    out.g13 += second(0, 2);
    out.g23 += second(1, 2);
    double s3 = 0.0;
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        for (int w = 0; w < 3; ++w)
          s3 += op[0][x] * op[1][y] * op[2][w] * d[kH[x] + kH[y] + kH[w]][kK[x] + kK[y] + kK[w]];
    out.g123 += scale * s3;
  }
  return out;
}

template <class K = GaussianKernels>
TripleExponentPartials triple_exponent_partials(double z1, double z2, double z3, const TripleGeometry& g) {
  const auto lp = triple_log_partials<K>(z1, z2, z3, g);
  TripleExponentPartials out;
  out.v = lp.v;
  out.first = {lp.g[0] / z1, lp.g[1] / z2, lp.g[2] / z3};
  out.v12 = lp.g12 / (z1 * z2);
  out.v13 = lp.g13 / (z1 * z3);
  out.v23 = lp.g23 / (z2 * z3);
  out.v123 = lp.g123 / (z1 * z2 * z3);
  return out;
}

//! d^3 exp(-V) / dz1 dz2 dz3 = e^{-V} (-V123 + V13 V2 + V1 V23 + V12 V3 - V1 V2 V3).
inline double triple_density_from_partials(const TripleExponentPartials& p) {
  const auto& [v1, v2, v3] = p.first;
  return std::exp(-p.v) * (-p.v123 + p.v13 * v2 + v1 * p.v23 + p.v12 * v3 - v1 * v2 * v3);
}

//! Same expansion on the log scale, with each z_i factored out.
template <class K = GaussianKernels>
double triple_log_density(double z1, double z2, double z3, const TripleGeometry& g) {
  const auto p = triple_log_partials<K>(z1, z2, z3, g);
  const double bracket =
      -p.g123 + p.g13 * p.g[1] + p.g[0] * p.g23 + p.g12 * p.g[2] - p.g[0] * p.g[1] * p.g[2];
  if (!(bracket > 0.0)) return -INFINITY;
  return -p.v - std::log(z1) - std::log(z2) - std::log(z3) + std::log(bracket);
}

template <class K = GaussianKernels>
double triple_density(double z1, double z2, double z3, const TripleGeometry& g) {
  return std::exp(triple_log_density<K>(z1, z2, z3, g));
}

// ---------------------------------------------------------------------------
// Composite likelihoods.

//! Observed field values on triangulation vertices, both indexed by vertex id.
struct SiteView {
  std::span<const Point> points;
  std::span<const double> eta;
};

template <class K = GaussianKernels>
double pairwise_cl(const SiteView& data, const EdgeSet& edges, const FieldParams& params) {
  std::vector<double> terms;
  terms.reserve(edges.size());
  for (const auto& e : edges.pairs) {
    const auto i = static_cast<std::size_t>(e[0]), j = static_cast<std::size_t>(e[1]);
    if (i >= data.eta.size() || j >= data.eta.size() || i >= data.points.size() || j >= data.points.size())
      throw ContractError("pairwise_cl: edge refers to a site without data");
    const PairGeometry g(distance(data.points[i], data.points[j]), params);
    const double t = pair_log_density<K>(data.eta[i], data.eta[j], g);
    if (!std::isfinite(t)) {
      std::ostringstream os;
      os.precision(17);
      os << "pairwise_cl: non-finite term " << t << " on edge (" << i << ", " << j << "), eta = (" << data.eta[i]
         << ", " << data.eta[j] << "), a = " << g.a;
      throw NumericalError(os.str());
    }
    terms.push_back(t);
  }
  return detail::pairwise_sum(terms);
}

template <class K = GaussianKernels>
double triplewise_cl(const SiteView& data, const TriangleSet& triangles, const FieldParams& params) {
  std::vector<double> terms;
  terms.reserve(triangles.size());
  for (const auto& t : triangles.triples) {
    const auto i = static_cast<std::size_t>(t[0]), j = static_cast<std::size_t>(t[1]), k = static_cast<std::size_t>(t[2]);
    const std::size_t hi = std::max({i, j, k});
    if (hi >= data.eta.size() || hi >= data.points.size())
      throw ContractError("triplewise_cl: triangle refers to a site without data");
    const TripleGeometry g(data.points[i], data.points[j], data.points[k], params);
    const double v = triple_log_density<K>(data.eta[i], data.eta[j], data.eta[k], g);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "triplewise_cl: non-finite term " << v << " on triangle (" << i << ", " << j << ", " << k
         << "), eta = (" << data.eta[i] << ", " << data.eta[j] << ", " << data.eta[k] << ")";
      throw NumericalError(os.str());
    }
    terms.push_back(v);
  }
  return detail::pairwise_sum(terms);
}

// ---------------------------------------------------------------------------
// Score limits as the site distances shrink.

struct ScoreLimit {
  double d_sigma = 0;         //!< limit of d/dsigma log f
  double d_alpha_scaled = 0;  //!< limit of (1/log d) d/dalpha log f
};

inline ScoreLimit pair_score_limit(double u, double sigma) {
  detail::require_finite(u, "pair_score_limit: u");
  detail::require_positive(sigma, "pair_score_limit: sigma");
  const double h2 = u * u - 1.0;
  return {h2 / sigma, 0.5 * h2};
}

inline ScoreLimit triple_score_limit(double u2, double u3, Correlation r1, double sigma) {
  detail::require_finite(u2, "triple_score_limit: u2");
  detail::require_finite(u3, "triple_score_limit: u3");
  detail::require_positive(sigma, "triple_score_limit: sigma");
  if (r1.is_singular()) throw SingularCorrelationError("triple_score_limit: |r1| = 1");
  const double r = r1.value();
  const double q = (u2 * u2 - 2.0 * r * u2 * u3 + u3 * u3) / ((1.0 - r) * (1.0 + r));
  return {(q - 2.0) / sigma, 0.5 * (q - 2.0)};
}

}  // namespace brcl
