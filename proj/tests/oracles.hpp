#pragma once

// Reference implementations that share no code with the library: a one-sided Jacobi
// SVD, multiprecision ascending series for J0/Y0, a direct plane-wave array sum and a
// separately written Born S-parameter.

#include <bornmusic/linalg.hpp>
#include <bornmusic/scene.hpp>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cdouble = std::complex<double>;

inline bornmusic::ComplexMatrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  bornmusic::ComplexMatrix m(rows, cols);
  for (auto& v : m.data()) v = {g(rng), g(rng)};
  return m;
}

/// Singular values (descending) by one-sided Hestenes Jacobi on the columns of A.
inline std::vector<double> singular_values(const bornmusic::ComplexMatrix& a) {
  const int m = a.rows();
  const int n = a.cols();
  std::vector<std::vector<cdouble>> col(static_cast<std::size_t>(n), std::vector<cdouble>(static_cast<std::size_t>(m)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) col[j][i] = a(i, j);

  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        cdouble gamma{};
        for (int i = 0; i < m; ++i) {
          alpha += std::norm(col[p][i]);
          beta += std::norm(col[q][i]);
          gamma += std::conj(col[p][i]) * col[q][i];
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= 1e-17 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cdouble phase = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          const cdouble x = col[p][i];
          const cdouble y = col[q][i] * std::conj(phase);
          col[p][i] = c * x - s * y;
          col[q][i] = s * x + c * y;
        }
      }
    if (!rotated) break;
  }
  std::vector<double> out;
  for (const auto& v : col) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    out.push_back(std::sqrt(s));
  }
  if (m < n) out.resize(static_cast<std::size_t>(m));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// H_0^(2)(z) = J_0(z) - i Y_0(z) from the ascending series in Digits-digit arithmetic
/// (principal branch of log). Cancellation costs about 0.87 |z| digits.
template <unsigned Digits = 80>
cdouble hankel2_0(cdouble zd) {
  using mp_complex = boost::multiprecision::cpp_complex<Digits>;
  using mp_real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>>;
  const mp_complex z(zd.real(), zd.imag());
  const mp_complex q = -(z * z) / mp_real(4);
  mp_complex term(1);
  mp_complex j0(1);
  mp_complex ysum(0);
  mp_real harmonic(0);
  const mp_real eps = pow(mp_real(10), -static_cast<int>(Digits) + 5);
  for (int k = 1; k < 4000; ++k) {
    term *= q / mp_real(k * k);
    harmonic += mp_real(1) / mp_real(k);
    j0 += term;
    const mp_complex add = term * harmonic;
    ysum -= add;
    if (abs(term) < eps && k > 10) break;
  }
  const mp_real pi = boost::math::constants::pi<mp_real>();
  const mp_real gamma = boost::math::constants::euler<mp_real>();
  const mp_complex y0 = (mp_real(2) / pi) * ((log(z / mp_real(2)) + gamma) * j0 + ysum);
  const mp_complex h = j0 - mp_complex(0, 1) * y0;
  return {static_cast<double>(h.real()), static_cast<double>(h.imag())};
}

/// (1/N) sum_n exp(i theta_n . v) for a complex planar vector v.
inline cdouble plane_wave_mean(const bornmusic::AntennaArray& array, cdouble vx, cdouble vy) {
  cdouble s{};
  for (int n = 0; n < array.count(); ++n) {
    const double th = array.angles()[static_cast<std::size_t>(n)];
    s += std::exp(cdouble(0.0, 1.0) * (std::cos(th) * vx + std::sin(th) * vy));
  }
  return s / static_cast<double>(array.count());
}

/// Born S-parameter written from scratch: (i a^2 k^2 pi / (4 w mu)) O u_m u_n with
/// u = (i/4) H_0^(2)(k d) evaluated by the multiprecision series.
inline cdouble born_sparam(const bornmusic::Scene& s, int m, int n) {
  const double w = 2.0 * M_PI * s.frequency;
  const cdouble k = std::sqrt(w * w * s.background.permeability * cdouble(s.background.permittivity, s.background.conductivity / w));
  cdouble total{};
  for (const auto& a : s.anomalies) {
    const double eb = s.background.permittivity;
    const cdouble contrast((a.medium.permittivity - eb) / eb, (a.medium.conductivity - s.background.conductivity) / (w * eb));
    auto u = [&](int idx) {
      const double th = 2.0 * (idx + 1) * M_PI / s.array.count();
      const double d = std::hypot(s.array.radius() * std::cos(th) - a.center.x, s.array.radius() * std::sin(th) - a.center.y);
      return cdouble(0.0, 0.25) * hankel2_0(k * d);
    };
    total += cdouble(0.0, 1.0) * a.radius * a.radius * k * k * M_PI / (4.0 * w * s.background.permeability) * contrast *
             u(m) * u(n);
  }
  return total;
}

}  // namespace oracle
