// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.
//
// Shared value types and error classes.

#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>

namespace brcl {

inline constexpr const char* kVersion = "0.3.1";

inline constexpr double kPi = 3.14159265358979323846;

//! Planar point in window coordinates.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point&, const Point&) = default;

  //! Lexicographic order (x first, then y).
  friend constexpr std::partial_ordering operator<=>(const Point& a, const Point& b) {
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.y <=> b.y;
  }
};

inline double norm(const Point& p) { return std::hypot(p.x, p.y); }
inline double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }
inline bool is_finite(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

//! Invalid argument value (non-finite, non-positive where positivity is required, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

//! A correlation of +-1 reached an operation that needs a nonsingular 2x2 matrix.
class SingularCorrelationError : public DomainError {
 public:
  using DomainError::DomainError;
};

//! Cholesky factorization failed even at the largest permitted jitter.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! The truncated spectral series needed more functions than the configured cap.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Too few points, or collinear/duplicate input to the triangulation.
class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

//! Caller broke an interface contract (missing spectral record, mismatched sizes, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

//! Numerical routine failed to reach its tolerance, or produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite argument");
}

inline void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(what) + ": argument must be finite and > 0");
}

}  // namespace detail
}  // namespace brcl
