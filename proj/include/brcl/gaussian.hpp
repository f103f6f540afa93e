// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Scalar and bivariate standard Gaussian kernels.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "brcl/core.hpp"

namespace brcl {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kSqrt2 = 1.41421356237309504880;

//! Correlation coefficient of a standard bivariate normal.
//!
//! Values within 1e-12 outside [-1, 1] are clamped onto the boundary; anything
//! further out is rejected.
class Correlation {
 public:
  static constexpr double kClampBand = 1e-12;

  constexpr Correlation() = default;

  explicit Correlation(double rho) {
    if (std::isnan(rho)) throw DomainError("Correlation: NaN");
    if (rho > 1.0 + kClampBand || rho < -1.0 - kClampBand)
      throw DomainError("Correlation: |rho| > 1 (rho = " + std::to_string(rho) + ")");
    rho_ = std::clamp(rho, -1.0, 1.0);
  }

  constexpr double value() const { return rho_; }
  constexpr operator double() const { return rho_; }
  constexpr bool is_singular() const { return rho_ == 1.0 || rho_ == -1.0; }

 private:
  double rho_ = 0.0;
};

inline double std_normal_pdf(double x) {
  detail::require_finite(x, "std_normal_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

inline double std_normal_cdf(double x) {
  if (std::isnan(x)) throw DomainError("std_normal_cdf: NaN");
  return 0.5 * std::erfc(-x / kSqrt2);
}

//! Upper tail 1 - Phi(x), accurate for large positive x.
inline double std_normal_sf(double x) {
  if (std::isnan(x)) throw DomainError("std_normal_sf: NaN");
  return 0.5 * std::erfc(x / kSqrt2);
}

//! log Phi(x), finite down to the far lower tail.
inline double log_std_normal_cdf(double x) {
  if (std::isnan(x)) throw DomainError("log_std_normal_cdf: NaN");
  if (x > -20.0) return std::log(std_normal_cdf(x));
  if (x == -INFINITY) return -INFINITY;
  // Asymptotic series of the Mills ratio.
  const double z = 1.0 / (x * x);
  const double series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z)));
  return -0.5 * x * x - std::log(-x) - 0.91893853320467274178 + std::log(series);
}

namespace detail {

// Gauss-Legendre half-rules (positive nodes, weights) for 6, 12 and 20 points.
inline constexpr std::array<double, 3> kGl6X = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
inline constexpr std::array<double, 3> kGl6W = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
inline constexpr std::array<double, 6> kGl12X = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                                                 0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
inline constexpr std::array<double, 6> kGl12W = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                                                 0.2031674267230659, 0.2334925365383547, 0.2491470458134029};
inline constexpr std::array<double, 10> kGl20X = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                                                  0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                                                  0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                                                  0.07652652113349733};
inline constexpr std::array<double, 10> kGl20W = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                                                  0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
                                                  0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
                                                  0.1527533871307259};

template <std::size_t M, class F>
double gl_sum(const std::array<double, M>& xs, const std::array<double, M>& ws, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < M; ++i) s += ws[i] * (f(1.0 - xs[i]) + f(1.0 + xs[i]));
  return s;
}

template <class F>
double gl_by_rho(double abs_r, F&& f) {
  if (abs_r < 0.3) return gl_sum(kGl6X, kGl6W, f);
  if (abs_r < 0.75) return gl_sum(kGl12X, kGl12W, f);
  return gl_sum(kGl20X, kGl20W, f);
}

// Upper orthant P[X > h, Y > k] for finite h, k and |r| <= 1 (Drezner-Genz).
inline double bvn_upper(double h, double k, double r) {
  constexpr double two_pi = 2.0 * kPi;
  const double abs_r = std::abs(r);
  double hk = h * k;
  double bvn = 0.0;
  if (abs_r < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = 0.5 * std::asin(r);
    bvn = gl_by_rho(abs_r, [&](double x) {
      const double sn = std::sin(asr * x);
      return std::exp((sn * hk - hs) / (1.0 - sn * sn));
    });
    bvn = bvn * asr / two_pi + std_normal_sf(h) * std_normal_sf(k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (abs_r < 1.0) {
      const double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 80.0;
      double asr = -(bs / as + hk) / 2.0;
      if (asr > -100.0) bvn = a * std::exp(asr) * (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
      if (hk > -100.0) {
        const double b = std::sqrt(bs);
        const double sp = std::sqrt(two_pi) * std_normal_cdf(-b / a);
        bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
      }
      a *= 0.5;
      const double tail = gl_by_rho(abs_r, [&](double x) {
        const double xs = (a * x) * (a * x);
        const double e = -(bs / xs + hk) / 2.0;
        if (!(e > -100.0)) return 0.0;
        const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
        const double rs = std::sqrt(1.0 - xs);
        const double ep = std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
        return std::exp(e) * (sp - ep);
      });
      bvn = (a * tail - bvn) / two_pi;
    }
    if (r > 0.0) {
      bvn += std_normal_sf(std::max(h, k));
    } else if (h >= k) {
      bvn = -bvn;
    } else {
      const double l = h < 0.0 ? std_normal_cdf(k) - std_normal_cdf(h) : std_normal_sf(h) - std_normal_sf(k);
      bvn = l - bvn;
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

inline void require_not_nan(double h, double k, const char* what) {
  if (std::isnan(h) || std::isnan(k)) throw DomainError(std::string(what) + ": NaN argument");
}

inline void require_nonsingular(Correlation rho, const char* what) {
  if (rho.is_singular()) throw SingularCorrelationError(std::string(what) + ": |rho| = 1");
}

}  // namespace detail

//! P[X <= h, Y <= k] for a standard bivariate normal with correlation rho.
inline double bvn_cdf(double h, double k, Correlation rho) {
  detail::require_not_nan(h, k, "bvn_cdf");
  if (h == -INFINITY || k == -INFINITY) return 0.0;
  if (h == INFINITY) return std_normal_cdf(k);
  if (k == INFINITY) return std_normal_cdf(h);
  const double r = rho.value();
  if (r == 1.0) return std::min(std_normal_cdf(h), std_normal_cdf(k));
  if (r == -1.0) return std::max(std_normal_cdf(h) + std_normal_cdf(k) - 1.0, 0.0);
  return detail::bvn_upper(-h, -k, r);
}

inline double bvn_pdf(double h, double k, Correlation rho) {
  detail::require_nonsingular(rho, "bvn_pdf");
  detail::require_finite(h, "bvn_pdf");
  detail::require_finite(k, "bvn_pdf");
  const double r = rho.value();
  const double s2 = (1.0 - r) * (1.0 + r);
  const double q = (h * h - 2.0 * r * h * k + k * k) / s2;
  return std::exp(-0.5 * q) / (2.0 * kPi * std::sqrt(s2));
}

//! Partial derivative of bvn_cdf in its first argument: phi(h) Phi((k - rho h) / sqrt(1 - rho^2)).
inline double bvn_cdf_dh(double h, double k, Correlation rho) {
  detail::require_nonsingular(rho, "bvn_cdf_dh");
  detail::require_not_nan(h, k, "bvn_cdf_dh");
  if (std::isinf(h)) return 0.0;
  const double r = rho.value();
  if (std::isinf(k)) return k > 0 ? std_normal_pdf(h) : 0.0;
  return std_normal_pdf(h) * std_normal_cdf((k - r * h) / std::sqrt((1.0 - r) * (1.0 + r)));
}

//! Default kernel policy consumed by the likelihood templates.
struct GaussianKernels {
  static double pdf(double x) { return std_normal_pdf(x); }
  static double cdf(double x) { return std_normal_cdf(x); }
  static double log_cdf(double x) { return log_std_normal_cdf(x); }
  static double bvn_cdf(double h, double k, Correlation r) { return brcl::bvn_cdf(h, k, r); }
  static double bvn_pdf(double h, double k, Correlation r) { return brcl::bvn_pdf(h, k, r); }
  static double bvn_cdf_dh(double h, double k, Correlation r) { return brcl::bvn_cdf_dh(h, k, r); }
};

}  // namespace brcl
