// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// One-parameter maximum composite-likelihood estimators of sigma and alpha
// over compact intervals, the other parameter held fixed.

#pragma once

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include "brcl/core.hpp"
#include "brcl/geometry.hpp"
#include "brcl/likelihood.hpp"

namespace brcl {

struct CompactInterval {
  double lo = 0.0;
  double hi = 1.0;

  CompactInterval() = default;
  CompactInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw DomainError("CompactInterval: need finite lo < hi");
  }

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

inline CompactInterval default_sigma_set() { return {0.2, 5.0}; }
inline CompactInterval default_alpha_set() { return {0.05, 0.95}; }

struct MaximizeOptions {
  int probes = 32;
  double tolerance = 1e-6;
  std::uintmax_t max_iterations = 200;
};

struct EstimateReport {
  double estimate = 0.0;
  double objective_at_estimate = 0.0;
  std::size_t iterations = 0;  //!< objective evaluations, probes included
  double bracket_width_final = 0.0;
  bool boundary_hit = false;
  std::vector<std::pair<double, double>> trace;  //!< (parameter, objective) in evaluation order
};

//! Maximizes f over [lo, hi]: an equispaced probe grid picks the bracket
//! around the best probe, then Brent's golden-section/parabolic search
//! refines inside it.
inline EstimateReport maximize_on_interval(const std::function<double(double)>& f, const CompactInterval& set,
                                           const MaximizeOptions& opt = {}) {
  if (opt.probes < 3) throw DomainError("maximize_on_interval: need at least 3 probes");
  if (!(opt.tolerance > 0.0)) throw DomainError("maximize_on_interval: tolerance must be > 0");
  EstimateReport rep;
  auto eval = [&](double x) {
    const double v = f(x);
    rep.trace.emplace_back(x, v);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "maximize_on_interval: objective is " << v << " at " << x;
      throw NumericalError(os.str());
    }
    return v;
  };

  const int m = opt.probes;
  std::vector<double> xs(static_cast<std::size_t>(m)), fs(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    xs[static_cast<std::size_t>(i)] = i == m - 1 ? set.hi : set.lo + set.width() * i / (m - 1);
    fs[static_cast<std::size_t>(i)] = eval(xs[static_cast<std::size_t>(i)]);
  }
  const auto best = static_cast<std::size_t>(std::max_element(fs.begin(), fs.end()) - fs.begin());
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[std::min(best + 1, xs.size() - 1)];

  // Boost caps the relative precision at 2^-25; the final bracket is at most
  // four times fract1 = tol |x| + tol / 4 when the search converges.
  const double scale = std::max(std::abs(set.lo), std::abs(set.hi));
  const int bits = static_cast<int>(std::ceil(1.0 - std::log2(opt.tolerance / (4.0 * scale + 1.0))));
  std::uintmax_t iters = opt.max_iterations;
  const auto [x, negf] = boost::math::tools::brent_find_minima([&](double t) { return -eval(t); }, a, b, bits, iters);
  const double tol = std::ldexp(1.0, 1 - std::min(bits, 26));
  rep.bracket_width_final = iters < opt.max_iterations ? 4.0 * (tol * std::abs(x) + tol / 4.0) : b - a;

  if (fs[best] > -negf) {
    rep.estimate = xs[best];
    rep.objective_at_estimate = fs[best];
  } else {
    rep.estimate = x;
    rep.objective_at_estimate = -negf;
  }
  rep.iterations = rep.trace.size();
  rep.boundary_hit = rep.estimate - set.lo <= opt.tolerance || set.hi - rep.estimate <= opt.tolerance;
  return rep;
}

namespace detail {

inline void require_alpha0(double alpha0, const char* what) {
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw DomainError(std::string(what) + ": alpha0 must lie in (0, 1)");
}

}  // namespace detail

template <class K = GaussianKernels>
EstimateReport mcle_sigma(const SiteView& data, const EdgeSet& edges, double alpha0,
                          const CompactInterval& set = default_sigma_set(), const MaximizeOptions& opt = {}) {
  detail::require_alpha0(alpha0, "mcle_sigma");
  return maximize_on_interval([&](double s) { return pairwise_cl<K>(data, edges, FieldParams(s, alpha0)); }, set, opt);
}

template <class K = GaussianKernels>
EstimateReport mcle_sigma(const SiteView& data, const TriangleSet& triangles, double alpha0,
                          const CompactInterval& set = default_sigma_set(), const MaximizeOptions& opt = {}) {
  detail::require_alpha0(alpha0, "mcle_sigma");
  return maximize_on_interval([&](double s) { return triplewise_cl<K>(data, triangles, FieldParams(s, alpha0)); }, set,
                              opt);
}

template <class K = GaussianKernels>
EstimateReport mcle_alpha(const SiteView& data, const EdgeSet& edges, double sigma0,
                          const CompactInterval& set = default_alpha_set(), const MaximizeOptions& opt = {}) {
  detail::require_positive(sigma0, "mcle_alpha: sigma0");
  return maximize_on_interval([&](double a) { return pairwise_cl<K>(data, edges, FieldParams(sigma0, a)); }, set, opt);
}

template <class K = GaussianKernels>
EstimateReport mcle_alpha(const SiteView& data, const TriangleSet& triangles, double sigma0,
                          const CompactInterval& set = default_alpha_set(), const MaximizeOptions& opt = {}) {
  detail::require_positive(sigma0, "mcle_alpha: sigma0");
  return maximize_on_interval([&](double a) { return triplewise_cl<K>(data, triangles, FieldParams(sigma0, a)); }, set,
                              opt);
}

}  // namespace brcl
