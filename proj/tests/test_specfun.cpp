#include <bornmusic/errors.hpp>
#include <bornmusic/specfun.hpp>

#include "oracles.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/hankel.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace bornmusic;
using namespace bornmusic::specfun;
using cd = std::complex<double>;

namespace {

double ascending_j0(double x) {
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 200; ++m) {
    term *= -(x * x / 4.0) / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

}  // namespace

TEST(BesselJ, ValuesAtOrigin) {
  EXPECT_EQ(bessel_j(0, 0.0), 1.0);
  for (int q : {-5, -1, 1, 2, 17}) EXPECT_EQ(bessel_j(q, 0.0), 0.0);
}

TEST(BesselJ, J0AtOneMatchesAscendingSeries) {
  EXPECT_NEAR(bessel_j(0, 1.0), ascending_j0(1.0), 1e-15);
  EXPECT_NEAR(bessel_j(0, 1.0), 0.76519768655, 1e-11);
}

TEST(BesselJ, NegativeOrderParity) {
  EXPECT_DOUBLE_EQ(bessel_j(-3, 2.5), -bessel_j(3, 2.5));
  EXPECT_DOUBLE_EQ(bessel_j(-4, 2.5), bessel_j(4, 2.5));
}

TEST(BesselJ, MatchesBoostOverOrderAndArgumentRange) {
  double worst = 0.0;
  for (int q = 0; q <= 64; ++q)
    for (double x : {1e-6, 1e-4, 0.01, 0.3, 1.0, 2.5, 7.0, 12.0, 19.9, 33.3, 50.0, 64.0, 81.5, 100.0}) {
      const double ref = boost::math::cyl_bessel_j(q, x);
      worst = std::max(worst, std::abs(bessel_j(q, x) - ref));
    }
  EXPECT_LE(worst, 1e-12);
}

TEST(BesselJ, SmallArgumentBranchAgreesWithRecurrence) {
  for (int q = 0; q <= 10; ++q) {
    const double a = bessel_j(q, 0.999e-3);
    const double b = bessel_j(q, 1.001e-3);
    const double ref_a = boost::math::cyl_bessel_j(q, 0.999e-3);
    const double ref_b = boost::math::cyl_bessel_j(q, 1.001e-3);
    EXPECT_NEAR(a, ref_a, 1e-15 + 1e-12 * std::abs(ref_a)) << q;
    EXPECT_NEAR(b, ref_b, 1e-15 + 1e-12 * std::abs(ref_b)) << q;
  }
}

TEST(BesselJ, LargeArgumentsUpToLimit) {
  for (double x : {250.0, 1000.0, 5000.0, 1e4})
    for (int q : {0, 1, 7, 40}) EXPECT_NEAR(bessel_j(q, x), boost::math::cyl_bessel_j(q, x), 1e-12) << x << " " << q;
}

TEST(BesselJ, RejectsBadArguments) {
  EXPECT_THROW(bessel_j(0, -1.0), DomainError);
  EXPECT_THROW(bessel_j(0, std::nan("")), DomainError);
  EXPECT_THROW(bessel_j(0, std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(bessel_j(0, 2e4), DomainError);
}

TEST(BesselJ, NormalisationSumOfSquares) {
  for (double x = 0.0; x <= 20.0; x += 0.25) {
    const auto j = bessel_j_sequence(kMaxOrder, x);
    double s = j[0] * j[0];
    for (int q = 1; q <= kMaxOrder; ++q) s += 2.0 * j[q] * j[q];
    EXPECT_NEAR(s, 1.0, 1e-10) << x;
  }
}

TEST(BesselJ, ThreeTermRecurrenceResidual) {
  double worst = 0.0;
  for (double x = 0.1; x <= 50.0; x += 0.37)
    for (int q = -29; q <= 29; ++q) {
      const double r = bessel_j(q - 1, x) + bessel_j(q + 1, x) - (2.0 * q / x) * bessel_j(q, x);
      worst = std::max(worst, std::abs(r));
    }
  EXPECT_LE(worst, 1e-9);
}

TEST(Hankel2, ValueAtOne) {
  const cd h = hankel2_0(1.0);
  EXPECT_NEAR(h.real(), 0.76519769, 1e-8);
  EXPECT_NEAR(h.imag(), -0.08825696, 1e-8);
  const cd ref = oracle::hankel2_0(1.0);
  EXPECT_NEAR(std::abs(h - ref) / std::abs(ref), 0.0, 1e-14);
}

TEST(Hankel2, LeadingAsymptoticModulus) {
  const double x = 100.0;
  EXPECT_NEAR(std::abs(hankel2_0(x)) * std::sqrt(std::numbers::pi * x / 2.0), 1.0, 1e-3);
}

TEST(Hankel2, ImaginaryPartNegativeWhereY0Positive) {
  for (double x = 0.9; x <= 2.1; x += 0.01) EXPECT_LT(hankel2_0(x).imag(), 0.0) << x;
}

TEST(Hankel2, ConjugateSymmetryWithFirstKind) {
  for (cd z : {cd(1.0, 0.5), cd(8.4, -0.7), cd(-3.0, 2.0), cd(20.0, 4.0)})
    EXPECT_EQ(hankel1_0(z), std::conj(hankel2_0(std::conj(z))));
}

TEST(Hankel2, MatchesSeriesOracleOnRandomPoints) {
  std::mt19937_64 rng(20261014);
  std::uniform_real_distribution<double> logr(std::log(0.01), std::log(30.0));
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  int n = 0;
  while (n < 500) {
    const cd z = std::polar(std::exp(logr(rng)), angle(rng));
    if (std::abs(z.imag()) > 5.0) continue;
    ++n;
    const cd ref = oracle::hankel2_0(z);
    worst = std::max(worst, std::abs(hankel2_0(z) - ref) / std::abs(ref));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Hankel2, RelativeAccuracyAcrossFullRange) {
  // 1e-3 <= |z| <= 1e4: series oracle below 150, Boost's real-argument Hankel above.
  double worst = 0.0;
  for (double r : {1e-3, 0.004, 0.05, 0.7, 3.0, 11.9, 12.1, 25.0, 60.0, 140.0})
    for (double th : {0.0, 0.02, -0.02, 0.3, -1.2, 1.9, 3.0, -3.0}) {
      const cd z = std::polar(r, th);
      if (std::abs(z.imag()) > 20.0) continue;
      const cd ref = oracle::hankel2_0<200>(z);
      worst = std::max(worst, std::abs(hankel2_0(z) - ref) / std::abs(ref));
    }
  for (double x : {150.0, 900.0, 3000.0, 1e4}) {
    const cd ref = boost::math::cyl_hankel_2(0, x);
    worst = std::max(worst, std::abs(hankel2_0(x) - ref) / std::abs(ref));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Hankel2, LowerHalfPlaneWhereSeriesCancels) {
  // H_0^(2) decays like exp(Im z) below the real axis; both sides of the series
  // crossover are covered.
  double worst = 0.0;
  for (double a = -12.0; a <= 12.0; a += 0.8)
    for (double b = -12.0; b <= -0.5; b += 0.7) {
      const cd z(a, b);
      if (std::abs(z) > 14.0) continue;
      const cd ref = oracle::hankel2_0<120>(z);
      worst = std::max(worst, std::abs(hankel2_0(z) - ref) / std::abs(ref));
    }
  EXPECT_LE(worst, 1e-9);
}

TEST(Hankel2, BranchCutApproachedFromBothSides) {
  for (double x : {0.5, 4.0, 15.0}) {
    const cd above(-x, 1e-12), below(-x, -1e-12);
    EXPECT_NEAR(std::abs(hankel2_0(above) - oracle::hankel2_0(above)) / std::abs(oracle::hankel2_0(above)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(hankel2_0(below) - oracle::hankel2_0(below)) / std::abs(oracle::hankel2_0(below)), 0.0, 1e-9);
  }
}

TEST(Hankel2, Errors) {
  EXPECT_THROW(hankel2_0(0.0), SingularityError);
  EXPECT_THROW(hankel2_0(cd(std::nan(""), 1.0)), DomainError);
  EXPECT_THROW(hankel2_0(cd(2e6, 0.0)), DomainError);
}

TEST(JacobiAnger, ZeroArgumentNeedsNoTerms) { EXPECT_EQ(jacobi_anger_truncation(0.0, 1e-10), 0); }

TEST(JacobiAnger, ResidualBelowToleranceAtTen) {
  const double x = 10.0;
  const int q_max = jacobi_anger_truncation(x, 1e-10);
  const auto j = bessel_j_sequence(q_max, x);
  double worst = 0.0;
  for (int s = 0; s < 360; ++s) {
    const double th = 2.0 * std::numbers::pi * s / 360.0;
    cd sum = j[0];
    for (int q = 1; q <= q_max; ++q) sum += 2.0 * std::pow(cd(0.0, 1.0), q) * j[q] * std::cos(q * th);
    worst = std::max(worst, std::abs(std::exp(cd(0.0, x * std::cos(th))) - sum));
  }
  EXPECT_LE(worst, 1e-10);
  // One fewer term must not satisfy the tail bound.
  double tail = 0.0;
  for (int q = q_max; q <= kMaxOrder; ++q) tail += 2.0 * std::abs(boost::math::cyl_bessel_j(q, x));
  EXPECT_GT(tail, 1e-10);
}

TEST(JacobiAnger, OrderNondecreasingInArgument) {
  int prev = 0;
  for (int x = 1; x <= 20; ++x) {
    const int q = jacobi_anger_truncation(x, 1e-10);
    EXPECT_GE(q, prev) << x;
    prev = q;
  }
}

TEST(JacobiAnger, ExpansionMatchesExponentialOn720Angles) {
  for (double x : {0.5, 1.0, 5.0, 10.0, 20.0}) {
    const int q_max = jacobi_anger_truncation(x, 1e-10);
    std::vector<double> jp(static_cast<std::size_t>(q_max) + 1), jn(static_cast<std::size_t>(q_max) + 1);
    for (int q = 0; q <= q_max; ++q) {
      jp[q] = bessel_j(q, x);
      jn[q] = bessel_j(-q, x);
    }
    double worst = 0.0;
    for (int s = 0; s < 720; ++s) {
      const double th = 2.0 * std::numbers::pi * s / 720.0;
      cd sum = jp[0];
      for (int q = 1; q <= q_max; ++q) {
        sum += std::pow(cd(0.0, 1.0), q) * jp[q] * std::exp(cd(0.0, q * th));
        sum += std::pow(cd(0.0, 1.0), -q) * jn[q] * std::exp(cd(0.0, -q * th));
      }
      worst = std::max(worst, std::abs(std::exp(cd(0.0, x * std::cos(th))) - sum));
    }
    EXPECT_LE(worst, 1e-9) << x;
  }
}

TEST(JacobiAnger, ReportsRequiredOrderWhenCeilingTooSmall) {
  try {
    jacobi_anger_truncation(60.0, 1e-10, 40);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_GT(e.required_order(), 40);
    EXPECT_EQ(e.required_order(), jacobi_anger_truncation(60.0, 1e-10, 200));
  }
}

TEST(JacobiAnger, RejectsToleranceOutsideRange) {
  EXPECT_THROW(jacobi_anger_truncation(1.0, 0.0), DomainError);
  EXPECT_THROW(jacobi_anger_truncation(1.0, 0.5), DomainError);
  EXPECT_THROW(jacobi_anger_truncation(-1.0, 1e-6), DomainError);
}
