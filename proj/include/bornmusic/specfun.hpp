#pragma once

// Bessel functions of integer order (real argument) and the zero-order Hankel
// function of the second kind (complex argument).

#include <bornmusic/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace bornmusic::specfun {

using cdouble = std::complex<double>;

/// Default ceiling on |q| for truncated Bessel series.
inline constexpr int kMaxOrder = 128;

/// |z| at and below which hankel2_0 uses the ascending series.
inline constexpr double kSeriesCrossover = 12.0;

/// |Im z| beyond which the ascending series loses more than ~4 digits to cancellation
/// in the lower half-plane.
inline constexpr double kCancellationLimit = 4.0;
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// J_0(x), ..., J_max_order(x) for x >= 0 by Miller's backward recurrence,
/// normalised with J_0 + 2 sum_k J_2k = 1.
inline std::vector<double> bessel_j_sequence(int max_order, double x) {
  if (!std::isfinite(x) || x < 0.0) throw DomainError("bessel_j: argument must be finite and non-negative");
  if (x > 1e4) throw DomainError("bessel_j: argument above 1e4");
  if (max_order < 0) throw DomainError("bessel_j: negative sequence length");

  std::vector<double> j(static_cast<std::size_t>(max_order) + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  if (x < 1e-3) {
    // Ascending series per order; the recurrence would overflow for tiny x.
    const double w = -0.25 * x * x;
    double lead = 1.0;  // (x/2)^q / q!
    for (int q = 0; q <= max_order && lead != 0.0; ++q) {
      if (q > 0) lead *= 0.5 * x / q;
      double term = 1.0;
      double sum = 1.0;
      for (int m = 1; m < 8; ++m) {
        term *= w / (static_cast<double>(m) * (m + q));
        sum += term;
      }
      j[static_cast<std::size_t>(q)] = lead * sum;
    }
    return j;
  }

  const double top = std::max(static_cast<double>(max_order), x);
  int start = static_cast<int>(top + 40.0 + 12.0 * std::cbrt(x));
  start += start % 2;

  constexpr double kBig = 1e250;
  double next = 0.0;  // J_{k+1}
  double cur = 1e-300;  // J_k
  double norm_sum = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = (2.0 * k / x) * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    // cur now holds J_{k-1}
    if (k - 1 <= max_order) j[static_cast<std::size_t>(k - 1)] = cur;
    if (k - 1 > 0 && (k - 1) % 2 == 0) norm_sum += 2.0 * cur;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      next /= kBig;
      norm_sum /= kBig;
      for (int q = std::max(k - 1, 0); q <= max_order; ++q) j[static_cast<std::size_t>(q)] /= kBig;
    }
  }
  norm_sum += cur;  // J_0
  for (double& v : j) v /= norm_sum;
  return j;
}

/// J_q(x) for integer q of either sign, x in [0, 1e4].
inline double bessel_j(int q, double x) {
  const int order = q < 0 ? -q : q;
  const double v = bessel_j_sequence(order, x)[static_cast<std::size_t>(order)];
  return (q < 0 && (order % 2 == 1)) ? -v : v;
}

namespace detail {

// J_0 and Y_0 by the ascending series; Y_0 uses the principal branch of log.
inline void j0_y0_series(cdouble z, cdouble& j0, cdouble& y0) {
  const cdouble w = 0.25 * z * z;
  cdouble term = 1.0;  // (-w)^m / (m!)^2
  cdouble sum_j = 1.0;
  cdouble sum_y = 0.0;
  double harmonic = 0.0;
  for (int m = 1; m < 200; ++m) {
    term *= -w / (static_cast<double>(m) * m);
    harmonic += 1.0 / m;
    sum_j += term;
    sum_y -= harmonic * term;
    if (m > std::abs(z) && std::abs(term) * (1.0 + harmonic) < 1e-18 * std::max(1.0, std::abs(sum_j))) break;
  }
  j0 = sum_j;
  y0 = (2.0 / std::numbers::pi) * ((std::log(0.5 * z) + kEulerGamma) * sum_j + sum_y);
}

// Hankel large-argument expansion of H_0^(2), valid for Re z >= 0.
inline cdouble hankel2_0_asymptotic(cdouble z) {
  const cdouble inv = 1.0 / z;
  const cdouble minus_i(0.0, -1.0);
  cdouble sum = 1.0;
  cdouble term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double odd = 2.0 * k - 1.0;
    const cdouble next = term * (-(odd * odd) / (8.0 * k)) * minus_i * inv;
    const double mag = std::abs(next);
    if (mag >= last) break;  // asymptotic series: stop at the smallest term
    term = next;
    sum += term;
    last = mag;
    if (mag < 1e-17) break;
  }
  const cdouble phase = std::exp(cdouble(0.0, -1.0) * (z - 0.25 * std::numbers::pi));
  return std::sqrt(2.0 / (std::numbers::pi * z)) * phase * sum;
}

inline cdouble hankel1_0_asymptotic(cdouble z) { return std::conj(hankel2_0_asymptotic(std::conj(z))); }

// K_0(w) = int_0^inf exp(-w cosh t) dt for Re w > 0 by the trapezoidal rule, which
// converges geometrically for this analytic, doubly-exponentially decaying integrand.
inline cdouble k0_integral(cdouble w) {
  constexpr double h = 0.02;
  cdouble sum = 0.5 * std::exp(-w);
  for (int k = 1; k < 2000; ++k) {
    const cdouble term = std::exp(-w * std::cosh(k * h));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return h * sum;
}

}  // namespace detail

/// H_0^(2)(z) = J_0(z) - i Y_0(z), principal branch (cut along the negative real axis).
inline cdouble hankel2_0(cdouble z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("hankel2_0: non-finite argument");
  if (z == cdouble(0.0, 0.0)) throw SingularityError("hankel2_0: singular at z = 0");
  if (std::abs(z) > 1e6) throw DomainError("hankel2_0: |z| above 1e6");

  if (std::abs(z) <= kSeriesCrossover) {
    // Deep in the lower half-plane H_0^(2) is exponentially small and J_0 - i Y_0 cancels;
    // use H_0^(2)(z) = (2i/pi) K_0(iz) there instead.
    if (z.imag() < -kCancellationLimit)
      return cdouble(0.0, 2.0 / std::numbers::pi) * detail::k0_integral(cdouble(0.0, 1.0) * z);
    cdouble j0, y0;
    detail::j0_y0_series(z, j0, y0);
    return j0 - cdouble(0.0, 1.0) * y0;
  }
  if (z.real() >= 0.0) return detail::hankel2_0_asymptotic(z);

  // Left half-plane: analytic continuation from w = -z, Re w > 0.
  const cdouble w = -z;
  if (z.imag() >= 0.0) {
    // H2(w e^{i pi}) = H2(w) + 2 J0(w)
    const cdouble h2 = detail::hankel2_0_asymptotic(w);
    const cdouble h1 = detail::hankel1_0_asymptotic(w);
    return h2 + (h1 + h2);
  }
  // H2(w e^{-i pi}) = -H1(w)
  return -detail::hankel1_0_asymptotic(w);
}

/// H_0^(1)(z) = conj(H_0^(2)(conj z)).
inline cdouble hankel1_0(cdouble z) { return std::conj(hankel2_0(std::conj(z))); }

/// Smallest Q for which the Jacobi-Anger tail bound sum_{|q|>Q} |J_q(x)| is <= tol;
/// the bound dominates the sup over theta of the truncation residual.
inline int jacobi_anger_truncation(double x, double tol, int max_order = kMaxOrder) {
  if (!(tol > 0.0) || tol > 1e-2) throw DomainError("jacobi_anger_truncation: tol must lie in (0, 1e-2]");
  if (!std::isfinite(x) || x < 0.0) throw DomainError("jacobi_anger_truncation: x must be finite and non-negative");
  if (x == 0.0) return 0;

  // Orders beyond x + 40 + 12 x^(1/3) are below double precision.
  const int reach = std::max(max_order, static_cast<int>(x + 40.0 + 12.0 * std::cbrt(x)));
  const std::vector<double> j = bessel_j_sequence(reach, x);
  double tail = 0.0;  // 2 * sum_{q > Q} |J_q|, accumulated from the top
  int required = reach;
  for (int q = reach; q >= 1; --q) {
    const double with_q = tail + 2.0 * std::abs(j[static_cast<std::size_t>(q)]);
    if (with_q > tol) {
      required = q;
      break;
    }
    tail = with_q;
    required = q - 1;
  }
  if (required > max_order)
    throw TruncationError("jacobi_anger_truncation: order " + std::to_string(required) + " exceeds ceiling " +
                              std::to_string(max_order),
                          required);
  return required;
}

}  // namespace bornmusic::specfun
