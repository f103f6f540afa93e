// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Isotropic fractional Brownian fields and Brown-Resnick max-stable fields on
// finite point sets.
//
// The fBm W is anchored at the origin (W(0) = 0) and has semi-variogram
// gamma(x) = sigma^2 |x|^alpha / 2, hence
//
//   cov(W(x), W(y)) = sigma^2 (|x|^alpha + |y|^alpha - |x - y|^alpha) / 2.
//
// The Brown-Resnick field is simulated from its spectral representation
// eta(x) = max_i U_i exp(W_i(x) - gamma(x)), with U_i = 1 / Gamma_i and
// Gamma_1 < Gamma_2 < ... the arrival times of a unit-rate Poisson process.
// The series is truncated once U_{n+1} tau falls below min_p eta_n(p), where
// tau is a pilot estimate of a high quantile of sup_p Y(p).

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "brcl/core.hpp"
#include "brcl/rng.hpp"

namespace brcl {

//! Scale sigma > 0 and range alpha in (0, 2) of the power semi-variogram.
class FieldParams {
 public:
  FieldParams(double sigma, double alpha) : sigma_(sigma), alpha_(alpha) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("FieldParams: sigma must be > 0");
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("FieldParams: alpha must lie in (0, 2)");
  }

  double sigma() const { return sigma_; }
  double alpha() const { return alpha_; }
  double hurst() const { return 0.5 * alpha_; }

  //! gamma(x) = sigma^2 |x|^alpha / 2.
  double semivariogram(double r) const { return 0.5 * sigma_ * sigma_ * std::pow(r, alpha_); }
  double semivariogram(const Point& x) const { return semivariogram(norm(x)); }

  //! Standard deviation of a normalized increment over distance d: sigma d^(alpha/2).
  double increment_scale(double d) const { return sigma_ * std::pow(d, 0.5 * alpha_); }

  friend bool operator==(const FieldParams&, const FieldParams&) = default;

 private:
  double sigma_;
  double alpha_;
};

//! Ordered list of distinct, finite evaluation points.
class EvalPoints {
 public:
  EvalPoints() = default;

  explicit EvalPoints(std::vector<Point> points) : points_(std::move(points)) {
    for (const auto& p : points_)
      if (!is_finite(p)) throw DomainError("EvalPoints: non-finite coordinate");
    std::vector<Point> sorted = points_;
    std::sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) { return a < b; });
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw DomainError("EvalPoints: duplicate point");
  }

  std::size_t size() const { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

 private:
  std::vector<Point> points_;
};

inline double fbm_cov(const FieldParams& params, const Point& x, const Point& y) {
  if (!is_finite(x) || !is_finite(y)) throw DomainError("fbm_cov: non-finite point");
  const double a = params.alpha();
  const double s2 = params.sigma() * params.sigma();
  return 0.5 * s2 * (std::pow(norm(x), a) + std::pow(norm(y), a) - std::pow(distance(x, y), a));
}

//! Lower Cholesky factor of the fBm covariance on an EvalPoints set.
//!
//! Points at the origin carry W(0) = 0 exactly; their factor row is zero.
class CovarianceFactor {
 public:
  const Eigen::MatrixXd& matrix() const { return factor_; }
  std::size_t size() const { return static_cast<std::size_t>(factor_.rows()); }
  double jitter() const { return jitter_; }
  const FieldParams& params() const { return params_; }
  const EvalPoints& points() const { return points_; }

  //! Lower-triangular view used for sampling.
  auto lower() const { return factor_.triangularView<Eigen::Lower>(); }

 private:
  friend CovarianceFactor build_factor(const EvalPoints& points, const FieldParams& params);

  CovarianceFactor(EvalPoints points, FieldParams params) : params_(params), points_(std::move(points)) {}

  FieldParams params_;
  EvalPoints points_;
  Eigen::MatrixXd factor_;
  double jitter_ = 0.0;
};

namespace detail {

inline void fill_fbm_covariance(Eigen::MatrixXd& m, const EvalPoints& pts, const FieldParams& params,
                                double jitter) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  const double a = params.alpha();
  const double s2h = 0.5 * params.sigma() * params.sigma();
  std::vector<double> rpow(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) rpow[i] = std::pow(norm(pts[i]), a);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Point& pj = pts[static_cast<std::size_t>(j)];
    m(j, j) = rpow[static_cast<std::size_t>(j)] == 0.0 ? 1.0 : 2.0 * s2h * rpow[static_cast<std::size_t>(j)] + jitter;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const Point& pi = pts[static_cast<std::size_t>(i)];
      m(i, j) = s2h * (rpow[static_cast<std::size_t>(i)] + rpow[static_cast<std::size_t>(j)] -
                       std::pow(distance(pi, pj), a));
    }
  }
}

inline double min_pairwise_distance(const EvalPoints& pts) {
  std::vector<Point> s = pts.points();
  std::sort(s.begin(), s.end(), [](const Point& a, const Point& b) { return a < b; });
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size() && s[j].x - s[i].x < best; ++j) best = std::min(best, distance(s[i], s[j]));
  return best;
}

}  // namespace detail

//! Cholesky factor of Sigma + jitter I. The jitter starts at 0 and escalates
//! geometrically from 1e-12 to 1e-8 times the largest variance.
inline CovarianceFactor build_factor(const EvalPoints& points, const FieldParams& params) {
  if (points.size() == 0) throw DomainError("build_factor: empty point set");
  CovarianceFactor out(points, params);
  const auto n = static_cast<Eigen::Index>(points.size());
  double max_var = 0.0;
  for (const auto& p : points) max_var = std::max(max_var, params.sigma() * params.sigma() * std::pow(norm(p), params.alpha()));

  std::vector<double> schedule = {0.0};
  for (double j = 1e-12; j <= 1.0000001e-8; j *= 10.0) schedule.push_back(j * max_var);

  out.factor_.resize(n, n);
  for (double jitter : schedule) {
    detail::fill_fbm_covariance(out.factor_, points, params, jitter);
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(out.factor_);
    if (llt.info() == Eigen::Success) {
      out.factor_.triangularView<Eigen::StrictlyUpper>().setZero();
      for (Eigen::Index i = 0; i < n; ++i)
        if (norm(points[static_cast<std::size_t>(i)]) == 0.0) out.factor_(i, i) = 0.0;
      out.jitter_ = jitter;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "build_factor: covariance not positive definite after max jitter (n = " << n
      << ", min pairwise distance = " << detail::min_pairwise_distance(points) << ")";
  throw ConditioningError(msg.str());
}

//! Fills an n x m matrix with i.i.d. N(0,1) draws, column by column.
inline Eigen::MatrixXd standard_normal_matrix(Eigen::Index n, Eigen::Index m, Rng& rng) {
  Eigen::MatrixXd g(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = standard_normal(rng);
  return g;
}

//! One fBm draw, factor * g.
inline Eigen::VectorXd sample_fbm(const CovarianceFactor& factor, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(factor.size());
  Eigen::VectorXd g = standard_normal_matrix(n, 1, rng).col(0);
  return factor.lower() * g;
}

//! m independent fBm draws as columns. Consumes the stream exactly as m calls
//! to sample_fbm would.
inline Eigen::MatrixXd sample_fbm_batch(const CovarianceFactor& factor, Eigen::Index m, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(factor.size());
  Eigen::MatrixXd g = standard_normal_matrix(n, m, rng);
  return factor.lower() * g;
}

inline Eigen::VectorXd semivariogram_values(const EvalPoints& points, const FieldParams& params) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) g(static_cast<Eigen::Index>(i)) = params.semivariogram(points[i]);
  return g;
}

namespace detail {

inline double upper_quantile(std::vector<double> values, double delta) {
  const auto m = values.size();
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - delta) * static_cast<double>(m)));
  rank = std::clamp<std::size_t>(rank, 1, m);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

}  // namespace detail

//! Empirical (1 - delta) quantile of max_p Y(p), Y = exp(W - gamma), from
//! pilot_reps independent fBm draws on the factor's points.
inline double sup_y_quantile(const CovarianceFactor& factor, double delta, std::size_t pilot_reps, Rng& rng) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("sup_y_quantile: delta must lie in (0, 1)");
  if (pilot_reps < 1000) throw DomainError("sup_y_quantile: pilot_reps must be >= 1000");
  const Eigen::VectorXd gamma = semivariogram_values(factor.points(), factor.params());
  std::vector<double> log_sup;
  log_sup.reserve(pilot_reps);
  constexpr std::size_t kBatch = 64;
  for (std::size_t done = 0; done < pilot_reps; done += kBatch) {
    const auto m = static_cast<Eigen::Index>(std::min(kBatch, pilot_reps - done));
    Eigen::MatrixXd w = sample_fbm_batch(factor, m, rng);
    for (Eigen::Index j = 0; j < m; ++j) log_sup.push_back((w.col(j) - gamma).maxCoeff());
  }
  return std::exp(detail::upper_quantile(std::move(log_sup), delta));
}

inline double sup_y_quantile(const EvalPoints& points, const FieldParams& params, double delta, std::size_t pilot_reps,
                             Rng& rng) {
  return sup_y_quantile(build_factor(points, params), delta, pilot_reps, rng);
}

//! Retained spectral functions Z_i(x) = log U_i + W_i(x) - gamma(x).
struct SpectralRecord {
  Eigen::MatrixXd z_values;      //!< K x n, rows ordered by decreasing log U_i
  std::vector<double> log_u;     //!< log U_i per row
  std::vector<int> argmax;       //!< per point, row attaining the maximum
  Eigen::VectorXd gamma_values;  //!< gamma(x) per point
  double truncation_delta = 0.0;
  double tau = 1.0;  //!< stopping bound on sup Y

  std::size_t retained() const { return static_cast<std::size_t>(z_values.rows()); }
  std::size_t points() const { return static_cast<std::size_t>(z_values.cols()); }

  //! W_i(x) recovered from the stored row.
  double fbm_value(std::size_t i, std::size_t p) const {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto pp = static_cast<Eigen::Index>(p);
    return z_values(ii, pp) - log_u[i] + gamma_values(pp);
  }
};

struct FieldSample {
  Eigen::VectorXd eta;
  SpectralRecord record;
};

struct BrownResnickOptions {
  double delta = 1e-5;
  std::size_t pilot_reps = 1000;
  std::size_t max_functions = 10000;
  Eigen::Index batch = 16;
};

//! Brown-Resnick simulator bound to one point geometry. Owns the covariance
//! factor and the pilot stopping bound; sample() is const and reentrant.
class BrownResnickSampler {
 public:
  BrownResnickSampler(const EvalPoints& points, const FieldParams& params, const BrownResnickOptions& options,
                      Rng& pilot_rng)
      : factor_(build_factor(points, params)), options_(options) {
    if (!(options.delta > 0.0 && options.delta < 1.0)) throw DomainError("BrownResnickSampler: delta must lie in (0, 1)");
    gamma_ = semivariogram_values(points, params);
    tau_ = sup_y_quantile(factor_, options.delta, options.pilot_reps, pilot_rng);
  }

  BrownResnickSampler(CovarianceFactor factor, double tau, const BrownResnickOptions& options)
      : factor_(std::move(factor)), options_(options), tau_(tau) {
    gamma_ = semivariogram_values(factor_.points(), factor_.params());
  }

  const CovarianceFactor& factor() const { return factor_; }
  double tau() const { return tau_; }
  const BrownResnickOptions& options() const { return options_; }

  FieldSample sample(Rng& rng) const {
    // Separate sub-streams for arrivals and Gaussian draws keep the output
    // independent of the batch size.
    Rng arrivals(rng());
    Rng gauss(rng());
    const auto n = static_cast<Eigen::Index>(factor_.size());
    const double log_tau = std::log(tau_);

    std::vector<Eigen::VectorXd> rows;
    std::vector<double> log_u;
    Eigen::VectorXd running_max = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
    std::vector<int> argmax(static_cast<std::size_t>(n), -1);

    double arrival = standard_exponential(arrivals);
    Eigen::MatrixXd block;
    Eigen::Index block_pos = 0;
    for (;;) {
      if (block_pos == block.cols()) {
        block = sample_fbm_batch(factor_, options_.batch, gauss);
        block_pos = 0;
      }
      const int index = static_cast<int>(rows.size());
      const double lu = -std::log(arrival);
      Eigen::VectorXd z = block.col(block_pos++).array() - gamma_.array() + lu;
      for (Eigen::Index p = 0; p < n; ++p) {
        if (z(p) > running_max(p)) {
          running_max(p) = z(p);
          argmax[static_cast<std::size_t>(p)] = index;
        }
      }
      rows.push_back(std::move(z));
      log_u.push_back(lu);

      arrival += standard_exponential(arrivals);
      if (-std::log(arrival) + log_tau < running_max.minCoeff()) break;
      if (rows.size() >= options_.max_functions) {
        std::ostringstream msg;
        msg << "sample_brown_resnick: retained-function cap " << options_.max_functions << " exceeded";
        throw TruncationError(msg.str());
      }
    }

    FieldSample out;
    auto& rec = out.record;
    rec.z_values.resize(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t i = 0; i < rows.size(); ++i) rec.z_values.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    rec.log_u = std::move(log_u);
    rec.argmax = std::move(argmax);
    rec.gamma_values = gamma_;
    rec.truncation_delta = options_.delta;
    rec.tau = tau_;
    out.eta = running_max.array().exp();
    return out;
  }

 private:
  CovarianceFactor factor_;
  BrownResnickOptions options_;
  Eigen::VectorXd gamma_;
  double tau_ = 1.0;
};

//! One-shot simulation: the pilot quantile and the field share `rng`.
inline FieldSample sample_brown_resnick(const EvalPoints& points, const FieldParams& params, double delta, Rng& rng) {
  BrownResnickOptions options;
  options.delta = delta;
  BrownResnickSampler sampler(points, params, options, rng);
  return sampler.sample(rng);
}

}  // namespace brcl
