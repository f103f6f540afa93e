// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The brcl Authors.

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/owens_t.hpp>
#include <cmath>
#include <limits>

#include "brcl/gaussian.hpp"

namespace {

using brcl::Correlation;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Phi2 through Owen's T function; independent of the Drezner-Genz path.
double bvn_owen(double h, double k, double r) {
  using boost::math::owens_t;
  const double ph = brcl::std_normal_cdf(h);
  const double pk = brcl::std_normal_cdf(k);
  if (h == 0.0 && k == 0.0) return 0.25 + std::asin(r) / (2.0 * brcl::kPi);
  const double s = std::sqrt(1.0 - r * r);
  auto t_term = [&](double a, double b) {
    if (a == 0.0) return (b > 0 ? 0.25 : -0.25) - 0.0;
    return owens_t(a, (b - r * a) / (a * s));
  };
  double beta = 0.0;
  if (h * k < 0.0 || (h * k == 0.0 && (h + k) < 0.0)) beta = 0.5;
  return 0.5 * (ph + pk) - t_term(h, k) - t_term(k, h) - beta;
}

TEST(StdNormal, PdfValues) {
  EXPECT_DOUBLE_EQ(brcl::std_normal_pdf(0.0), 0.3989422804014327);
  EXPECT_NEAR(brcl::std_normal_pdf(1.0), 0.24197072451914337, 1e-17);
  EXPECT_EQ(brcl::std_normal_pdf(-1.0), brcl::std_normal_pdf(1.0));
  EXPECT_THROW(brcl::std_normal_pdf(kInf), brcl::DomainError);
  EXPECT_THROW(brcl::std_normal_pdf(std::nan("")), brcl::DomainError);
}

TEST(StdNormal, CdfValues) {
  EXPECT_EQ(brcl::std_normal_cdf(0.0), 0.5);
  EXPECT_EQ(brcl::std_normal_cdf(kInf), 1.0);
  EXPECT_EQ(brcl::std_normal_cdf(-kInf), 0.0);
  // mpmath, 30 digits: 0.97499999999999998623
  EXPECT_NEAR(brcl::std_normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_THROW(brcl::std_normal_cdf(std::nan("")), brcl::DomainError);
}

TEST(StdNormal, CdfMatchesQuadratureOfPdf) {
  boost::math::quadrature::gauss_kronrod<double, 61> gk;
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    const double q = x < 0 ? gk.integrate([](double t) { return brcl::std_normal_pdf(t); }, -kInf, x, 15, 1e-15)
                           : 0.5 + gk.integrate([](double t) { return brcl::std_normal_pdf(t); }, 0.0, x, 15, 1e-15);
    EXPECT_NEAR(brcl::std_normal_cdf(x), q, 1e-15) << x;
  }
}

TEST(StdNormal, CdfMonotoneAndSymmetric) {
  double prev = 0.0;
  for (double x = -10.0; x <= 10.0; x += 0.01) {
    const double p = brcl::std_normal_cdf(x);
    EXPECT_GE(p, prev);
    EXPECT_NEAR(p + brcl::std_normal_cdf(-x), 1.0, 1e-15);
    prev = p;
  }
}

TEST(CorrelationType, ClampBand) {
  EXPECT_EQ(Correlation(1.0 + 5e-13).value(), 1.0);
  EXPECT_EQ(Correlation(-1.0 - 5e-13).value(), -1.0);
  EXPECT_THROW(Correlation(1.0 + 1e-9), brcl::DomainError);
  EXPECT_THROW(Correlation(std::nan("")), brcl::DomainError);
  EXPECT_TRUE(Correlation(1.0).is_singular());
}

TEST(BvnCdf, SpecExamples) {
  EXPECT_NEAR(brcl::bvn_cdf(0, 0, Correlation(0)), 0.25, 1e-15);
  EXPECT_NEAR(brcl::bvn_cdf(0.4, kInf, Correlation(0.3)), brcl::std_normal_cdf(0.4), 1e-16);
  // Sheppard: 1/4 + asin(1/2) / (2 pi) = 1/3.
  EXPECT_NEAR(brcl::bvn_cdf(0, 0, Correlation(0.5)), 0.25 + std::asin(0.5) / (2 * brcl::kPi), 1e-14);
  EXPECT_NEAR(brcl::bvn_cdf(0, 0, Correlation(0.5)), 1.0 / 3.0, 1e-14);
  EXPECT_THROW(brcl::bvn_cdf(std::nan(""), 0, Correlation(0)), brcl::DomainError);
}

TEST(BvnCdf, FrozenHighPrecisionValues) {
  // Phi(h)Phi(k) + int_0^r phi2(h,k;t) dt evaluated with mpmath at 30 digits.
  struct Row {
    double h, k, r, p;
  };
  const Row rows[] = {
      {1, -1, 0.3, 0.14833820905742245016},     {-1.5, 0.7, -0.6, 0.019372920128727255952},
      {0.3, 0.4, 0.95, 0.58683204976566104127}, {-2, -2, 0.99, 0.019711642648668946097},
      {2.5, -0.5, -0.97, 0.3023278734002107618}, {-3, 1, 0.1, 0.0012270370094976626128},
      {0.7, -0.2, 0.4, 0.36690265459904069482}, {1.2, 1.1, -0.8, 0.74927316276977671866},
  };
  for (const auto& row : rows) EXPECT_NEAR(brcl::bvn_cdf(row.h, row.k, Correlation(row.r)), row.p, 1e-13);
}

TEST(BvnCdf, AgreesWithOwensTRoute) {
  for (double h = -4.0; h <= 4.0; h += 0.7) {
    for (double k = -4.0; k <= 4.0; k += 0.9) {
      for (double r : {-0.99, -0.93, -0.8, -0.5, -0.1, 0.0, 0.2, 0.6, 0.9, 0.95, 0.999}) {
        EXPECT_NEAR(brcl::bvn_cdf(h, k, Correlation(r)), bvn_owen(h, k, r), 1e-12) << h << " " << k << " " << r;
      }
    }
  }
}

TEST(BvnCdf, DegenerateCorrelations) {
  EXPECT_DOUBLE_EQ(brcl::bvn_cdf(0.3, -0.2, Correlation(1.0)), brcl::std_normal_cdf(-0.2));
  EXPECT_DOUBLE_EQ(brcl::bvn_cdf(0.3, -0.2, Correlation(-1.0)),
                   brcl::std_normal_cdf(0.3) + brcl::std_normal_cdf(-0.2) - 1.0);
  EXPECT_EQ(brcl::bvn_cdf(-1.0, -0.5, Correlation(-1.0)), 0.0);
  // Near-singular values approach the limits continuously.
  EXPECT_NEAR(brcl::bvn_cdf(0.3, -0.2, Correlation(1.0 - 1e-10)), brcl::std_normal_cdf(-0.2), 1e-5);
}

TEST(BvnCdf, SymmetryAndReflection) {
  for (double h = -3.0; h <= 3.0; h += 0.5) {
    for (double k = -3.0; k <= 3.0; k += 0.75) {
      for (double r = -0.95; r <= 0.95; r += 0.1) {
        const Correlation rho(r);
        EXPECT_NEAR(brcl::bvn_cdf(h, k, rho), brcl::bvn_cdf(k, h, rho), 1e-15);
        EXPECT_NEAR(brcl::bvn_cdf(h, k, rho) + brcl::bvn_cdf(-h, k, Correlation(-r)), brcl::std_normal_cdf(k), 1e-10);
      }
    }
  }
}

TEST(BvnPdf, ClosedForms) {
  EXPECT_NEAR(brcl::bvn_pdf(0, 0, Correlation(0)), 1.0 / (2 * brcl::kPi), 1e-17);
  EXPECT_NEAR(brcl::bvn_pdf(0, 0, Correlation(0.5)), 1.0 / (2 * brcl::kPi * std::sqrt(0.75)), 1e-16);
  // mpmath: 0.039983310267730254097
  EXPECT_NEAR(brcl::bvn_pdf(1, -1, Correlation(0.3)), 0.039983310267730254097, 1e-16);
  EXPECT_THROW(brcl::bvn_pdf(0, 0, Correlation(1.0)), brcl::SingularCorrelationError);
}

TEST(BvnPdf, MatchesMixedDifferenceOfCdf) {
  const double s = 1e-3;
  for (double h = -3.0; h <= 3.0; h += 0.6) {
    for (double k = -3.0; k <= 3.0; k += 0.6) {
      for (double r = -0.9; r <= 0.91; r += 0.3) {
        const Correlation rho(r);
        const double mixed = (brcl::bvn_cdf(h + s, k + s, rho) - brcl::bvn_cdf(h + s, k - s, rho) -
                              brcl::bvn_cdf(h - s, k + s, rho) + brcl::bvn_cdf(h - s, k - s, rho)) /
                             (4 * s * s);
        EXPECT_NEAR(mixed, brcl::bvn_pdf(h, k, rho), 1e-6) << h << " " << k << " " << r;
      }
    }
  }
}

TEST(BvnPdf, IntegratesToOne) {
  boost::math::quadrature::gauss_kronrod<double, 31> gk;
  for (double r : {-0.7, 0.0, 0.5, 0.9}) {
    const Correlation rho(r);
    const double total = gk.integrate(
        [&](double h) { return gk.integrate([&](double k) { return brcl::bvn_pdf(h, k, rho); }, -12.0, 12.0, 10, 1e-12); },
        -12.0, 12.0, 10, 1e-12);
    EXPECT_NEAR(total, 1.0, 1e-9) << r;
  }
}

TEST(BvnCdfDh, Examples) {
  EXPECT_DOUBLE_EQ(brcl::bvn_cdf_dh(0, kInf, Correlation(0)), brcl::std_normal_pdf(0));
  EXPECT_DOUBLE_EQ(brcl::bvn_cdf_dh(0, 0, Correlation(0)), brcl::std_normal_pdf(0) / 2);
  const double step = 1e-6;
  const Correlation rho(0.4);
  const double fd = (brcl::bvn_cdf(0.7 + step, -0.2, rho) - brcl::bvn_cdf(0.7 - step, -0.2, rho)) / (2 * step);
  EXPECT_NEAR(brcl::bvn_cdf_dh(0.7, -0.2, rho), fd, 1e-8);
  EXPECT_THROW(brcl::bvn_cdf_dh(0, 0, Correlation(-1.0)), brcl::SingularCorrelationError);
}

}  // namespace
