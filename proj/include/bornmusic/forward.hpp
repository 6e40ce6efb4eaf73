#pragma once

// Synthetic scattered-field S-parameters in the Born approximation.

#include <bornmusic/errors.hpp>
#include <bornmusic/linalg.hpp>
#include <bornmusic/scene.hpp>
#include <bornmusic/specfun.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <string_view>

namespace bornmusic {

enum class FieldMode { full_hankel, asymptotic };

inline std::string_view to_string(FieldMode m) { return m == FieldMode::full_hankel ? "full_hankel" : "asymptotic"; }

inline FieldMode parse_field_mode(std::string_view s) {
  if (s == "full_hankel" || s == "full") return FieldMode::full_hankel;
  if (s == "asymptotic") return FieldMode::asymptotic;
  throw ConfigError("mode", "expected full_hankel or asymptotic, got '" + std::string(s) + "'");
}

/// (i/4) H_0^(2)(k |r - r_src|).
inline cdouble incident_field(const Wavenumber& k, Point2 r, Point2 r_src) {
  const double d = distance(r, r_src);
  if (d == 0.0) throw SingularityError("incident_field: observation point coincides with source");
  return cdouble(0.0, 0.25) * specfun::hankel2_0(k.value * d);
}

/// Far-field form ((-1+i) e^{-ik|a|} / (4 sqrt(k pi |a|))) e^{ik theta.r} with theta = a/|a|.
inline cdouble asymptotic_incident_field(const Wavenumber& k, Point2 antenna, Point2 r) {
  const double range = norm(antenna);
  if (range == 0.0) throw DomainError("asymptotic_incident_field: antenna at the origin");
  const Point2 dir = (1.0 / range) * antenna;
  const cdouble i(0.0, 1.0);
  const cdouble amplitude = cdouble(-1.0, 1.0) * std::exp(-i * k.value * range) /
                            (4.0 * std::sqrt(k.value * std::numbers::pi * range));
  return amplitude * std::exp(i * k.value * dot(dir, r));
}

inline cdouble antenna_field(FieldMode mode, const Wavenumber& k, Point2 antenna, Point2 r) {
  return mode == FieldMode::full_hankel ? incident_field(k, antenna, r) : asymptotic_incident_field(k, antenna, r);
}

/// i alpha^2 k^2 pi / (4 omega mu_b): the Born prefactor multiplying contrast and u u.
inline cdouble born_prefactor(const Scene& scene, const Wavenumber& k_bw, double anomaly_radius) {
  const double a2 = anomaly_radius * anomaly_radius;
  return cdouble(0.0, 1.0) * a2 * k_bw.value * k_bw.value * std::numbers::pi /
         (4.0 * scene.omega() * scene.background.permeability);
}

/// Scattered-field S-parameter between transmitter m and receiver n (0-based), summed
/// over anomalies (first-order Born superposition).
inline cdouble born_sparam(const Scene& scene, const Wavenumber& k_bw, int m, int n,
                           FieldMode mode = FieldMode::full_hankel) {
  if (m == n) throw DomainError("born_sparam: diagonal entries are excluded");
  if (scene.anomalies.empty()) throw DomainError("born_sparam: scene has no anomalies");
  const Point2 am = scene.array.position(m);
  const Point2 an = scene.array.position(n);
  cdouble total{};
  for (const auto& anomaly : scene.anomalies) {
    const cdouble field_pair =
        antenna_field(mode, k_bw, am, anomaly.center) * antenna_field(mode, k_bw, an, anomaly.center);
    total += born_prefactor(scene, k_bw, anomaly.radius) * contrast(anomaly, scene.background, scene.omega()) *
             field_pair;
  }
  return total;
}

struct ScatteringMatrix {
  FieldMode mode = FieldMode::full_hankel;
  ComplexMatrix entries;

  int size() const noexcept { return entries.rows(); }
  friend bool operator==(const ScatteringMatrix&, const ScatteringMatrix&) = default;
};

/// N x N matrix of Born S-parameters with zero diagonal. The upper triangle is computed and
/// mirrored, so the result is exactly symmetric.
inline ScatteringMatrix scattering_matrix(const Scene& scene, const Wavenumber& k_bw,
                                          FieldMode mode = FieldMode::full_hankel) {
  check_scene(scene);
  const int n = scene.array.count();
  ScatteringMatrix k{mode, ComplexMatrix::square(n)};
  if (scene.anomalies.empty()) return k;

  // Per-anomaly antenna fields, then products; avoids recomputing Hankel values.
  std::vector<CVector> fields;
  std::vector<cdouble> weights;
  for (const auto& anomaly : scene.anomalies) {
    CVector f(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) f[static_cast<std::size_t>(a)] = antenna_field(mode, k_bw, scene.array.position(a), anomaly.center);
    fields.push_back(std::move(f));
    weights.push_back(born_prefactor(scene, k_bw, anomaly.radius) * contrast(anomaly, scene.background, scene.omega()));
  }
  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) {
      cdouble v{};
      for (std::size_t j = 0; j < fields.size(); ++j)
        v += weights[j] * (fields[j][static_cast<std::size_t>(r)] * fields[j][static_cast<std::size_t>(c)]);
      k.entries(r, c) = v;
      k.entries(c, r) = v;
    }
  }
  return k;
}

/// Mean |K_nm|^2 over off-diagonal entries.
inline double offdiagonal_power(const ComplexMatrix& m) {
  const int n = m.rows();
  double s = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (r != c) s += std::norm(m(r, c));
  return n > 1 ? s / (static_cast<double>(n) * (n - 1)) : 0.0;
}

/// Adds symmetric circular complex Gaussian noise to the off-diagonal entries so that
/// signal power / noise power = 10^(snr_db/10). snr_db = +inf returns the input.
inline ScatteringMatrix add_noise(const ScatteringMatrix& k, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
    throw DomainError("add_noise: snr_db must be finite or +inf");
  if (snr_db == std::numeric_limits<double>::infinity()) return k;

  const double noise_power = offdiagonal_power(k.entries) / std::pow(10.0, snr_db / 10.0);
  const double component_sd = std::sqrt(0.5 * noise_power);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ScatteringMatrix out = k;
  const int n = k.size();
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      const cdouble e(component_sd * re, component_sd * im);
      out.entries(r, c) += e;
      out.entries(c, r) += e;
    }
  return out;
}

// Text format:
//   n <N>
//   mode <full_hankel|asymptotic>
//   N*N lines "re,im", row-major, 17 significant digits.
inline void write_matrix_text(std::ostream& os, const ScatteringMatrix& k) {
  os << "n " << k.size() << '\n' << "mode " << to_string(k.mode) << '\n';
  char buf[64];
  for (const auto& v : k.entries.data()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v.real(), v.imag());
    os << buf;
  }
}

namespace detail {
inline double parse_double(std::string_view s, const std::string& what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(what, "not a number: '" + std::string(s) + "'");
  return v;
}
}  // namespace detail

inline ScatteringMatrix read_matrix_text(std::istream& is) {
  std::string key;
  int n = 0;
  std::string mode;
  if (!(is >> key >> n) || key != "n" || n < 1) throw ConfigError("matrix", "expected header 'n <N>'");
  if (!(is >> key >> mode) || key != "mode") throw ConfigError("matrix", "expected header 'mode <name>'");
  ScatteringMatrix k{parse_field_mode(mode), ComplexMatrix::square(n)};
  std::string line;
  std::getline(is, line);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n) * n; ++i) {
    if (!std::getline(is, line)) throw ConfigError("matrix", "expected " + std::to_string(n * n) + " entries");
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("matrix", "entry " + std::to_string(i) + " is not 're,im'");
    const std::string_view sv(line);
    k.entries.data()[i] = {detail::parse_double(sv.substr(0, comma), "matrix"),
                           detail::parse_double(sv.substr(comma + 1), "matrix")};
  }
  return k;
}

}  // namespace bornmusic
