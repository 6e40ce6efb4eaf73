#pragma once

#include <bornmusic/errors.hpp>
#include <bornmusic/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace bornmusic {

using cdouble = std::complex<double>;

inline constexpr double kVacuumPermittivity = 8.854e-12;     // F/m
inline constexpr double kBackgroundPermeability = 1.257e-6;  // H/m

/// Relative factor standing in for "much greater than" in the loss condition.
inline constexpr double kLossFactor = 5.0;
/// Relative factor standing in for "much greater than" in the far-field hypothesis.
inline constexpr double kFarFieldFactor = 10.0;

struct Medium {
  double permittivity = 0.0;  // F/m
  double conductivity = 0.0;  // S/m
  double permeability = kBackgroundPermeability;  // H/m

  friend bool operator==(const Medium&, const Medium&) = default;
};

inline void check_medium(const Medium& m, const std::string& field) {
  if (!std::isfinite(m.permittivity) || m.permittivity < 0.0)
    throw ConfigError(field + ".permittivity", "must be finite and non-negative");
  if (!std::isfinite(m.conductivity) || m.conductivity < 0.0)
    throw ConfigError(field + ".conductivity", "must be finite and non-negative");
  if (!std::isfinite(m.permeability) || m.permeability <= 0.0)
    throw ConfigError(field + ".permeability", "must be finite and positive");
}

/// Complex wavenumber k with k^2 = omega^2 mu (eps + i sigma / omega).
struct Wavenumber {
  double omega = 0.0;  // rad/s
  cdouble value;       // 1/m
};

/// Principal square root of omega^2 mu (eps + i sigma / omega); Re k > 0, Im k >= 0.
inline Wavenumber wavenumber(const Medium& medium, double omega) {
  if (!std::isfinite(omega) || omega <= 0.0) throw DomainError("wavenumber: omega must be finite and positive");
  if (!std::isfinite(medium.permittivity) || !std::isfinite(medium.conductivity) ||
      !std::isfinite(medium.permeability))
    throw DomainError("wavenumber: medium parameters must be finite");
  if (medium.permittivity < 0.0 || medium.conductivity < 0.0 || medium.permeability <= 0.0)
    throw DomainError("wavenumber: medium parameters out of range");
  if (medium.permittivity == 0.0 && medium.conductivity == 0.0)
    throw DomainError("wavenumber: medium with zero permittivity and conductivity has k = 0");

  const cdouble k2 = omega * omega * medium.permeability * cdouble(medium.permittivity, medium.conductivity / omega);
  if (medium.conductivity == 0.0) return {omega, cdouble(std::sqrt(k2.real()), 0.0)};
  return {omega, std::sqrt(k2)};
}

inline double angular_frequency(double frequency) { return 2.0 * std::numbers::pi * frequency; }

class AntennaArray;
inline AntennaArray uniform_circular_array(int count, double radius, double offset = 0.0);

/// Equispaced circular array; antenna n (1-based) sits at angle 2 n pi / N + offset.
class AntennaArray {
 public:
  AntennaArray() = default;

  double radius() const noexcept { return radius_; }
  int count() const noexcept { return static_cast<int>(positions_.size()); }
  const std::vector<Point2>& positions() const noexcept { return positions_; }
  const std::vector<double>& angles() const noexcept { return angles_; }
  Point2 position(int n) const { return positions_.at(static_cast<std::size_t>(n)); }
  /// Unit direction a_n / |a_n|.
  Point2 direction(int n) const {
    const double t = angles_.at(static_cast<std::size_t>(n));
    return {std::cos(t), std::sin(t)};
  }
  double offset() const noexcept { return offset_; }

  /// Same array with every antenna rotated by `angle` about the origin.
  AntennaArray rotated(double angle) const;

  friend AntennaArray uniform_circular_array(int count, double radius, double offset);

 private:
  double radius_ = 0.0;
  double offset_ = 0.0;
  std::vector<Point2> positions_;
  std::vector<double> angles_;
};

inline AntennaArray uniform_circular_array(int count, double radius, double offset) {
  if (count < 3) throw ConfigError("array.count", "at least 3 antennas are required");
  if (!std::isfinite(radius) || radius <= 0.0) throw ConfigError("array.radius", "must be finite and positive");
  AntennaArray a;
  a.radius_ = radius;
  a.offset_ = offset;
  a.positions_.reserve(static_cast<std::size_t>(count));
  a.angles_.reserve(static_cast<std::size_t>(count));
  for (int n = 1; n <= count; ++n) {
    const double theta = 2.0 * n * std::numbers::pi / count + offset;
    a.angles_.push_back(theta);
    a.positions_.push_back({radius * std::cos(theta), radius * std::sin(theta)});
  }
  return a;
}

inline AntennaArray AntennaArray::rotated(double angle) const {
  return uniform_circular_array(count(), radius_, offset_ + angle);
}

struct Anomaly {
  Point2 center;        // m
  double radius = 0.0;  // m
  Medium medium;
};

struct Scene {
  Medium background;
  double roi_radius = 0.0;  // m
  AntennaArray array;
  std::vector<Anomaly> anomalies;
  double frequency = 0.0;  // Hz

  double omega() const { return angular_frequency(frequency); }
  Wavenumber background_wavenumber() const { return wavenumber(background, omega()); }
};

/// Structural validity; throws ConfigError naming the offending field.
inline void check_scene(const Scene& s) {
  if (!std::isfinite(s.frequency) || s.frequency <= 0.0) throw ConfigError("scene.frequency", "must be positive");
  check_medium(s.background, "background");
  if (s.background.permittivity <= 0.0) throw ConfigError("background.permittivity", "must be positive");
  if (!std::isfinite(s.roi_radius) || s.roi_radius <= 0.0) throw ConfigError("roi.radius", "must be positive");
  if (s.array.count() < 3) throw ConfigError("array.count", "at least 3 antennas are required");
  if (!(s.array.radius() > s.roi_radius))
    throw ConfigError("array.radius", "antennas must lie outside the region of interest");
  for (std::size_t i = 0; i < s.anomalies.size(); ++i) {
    const auto& a = s.anomalies[i];
    const std::string field = "anomaly" + std::to_string(i + 1);
    check_medium(a.medium, field);
    if (!std::isfinite(a.radius) || a.radius <= 0.0) throw ConfigError(field + ".radius", "must be positive");
    if (!std::isfinite(a.center.x) || !std::isfinite(a.center.y))
      throw ConfigError(field + ".center", "must be finite");
    if (!(norm(a.center) + a.radius < s.roi_radius))
      throw ConfigError(field, "anomaly disk must lie strictly inside the region of interest");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& b = s.anomalies[j];
      if (!(distance(a.center, b.center) > a.radius + b.radius))
        throw ConfigError(field, "overlaps anomaly" + std::to_string(j + 1));
    }
  }
}

/// (eps* - eps_b)/eps_b + i (sigma* - sigma_b)/(omega eps_b).
inline cdouble contrast(const Anomaly& anomaly, const Medium& background, double omega) {
  if (!(background.permittivity > 0.0)) throw DomainError("contrast: background permittivity must be positive");
  const double eps_b = background.permittivity;
  return {(anomaly.medium.permittivity - eps_b) / eps_b,
          (anomaly.medium.conductivity - background.conductivity) / (omega * eps_b)};
}

struct Diagnostic {
  std::string name;
  bool passed = true;
  double value = 0.0;      // left-hand side of the inequality
  double threshold = 0.0;  // right-hand side
  std::string detail;
};

namespace detail {
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace detail

/// Checks the applicability conditions of the Born/MUSIC analysis. Never throws for a
/// structurally valid scene; each condition is reported as pass or warn.
///   loss:       omega eps_b >= 5 sigma_b
///   size:       2 alpha sqrt(eps*/eps_b) < 2 pi / Re k_bw   (worst anomaly)
///   far_field:  min_n |a_n - r*| >= 10 max{1/(4|k_bw|), 1/(4|k_aw|)}   (worst anomaly)
inline std::vector<Diagnostic> validate_scene(const Scene& scene, const Wavenumber& k_aw) {
  std::vector<Diagnostic> out;
  const double omega = scene.omega();
  const Wavenumber k_bw = scene.background_wavenumber();

  {
    Diagnostic d{"loss", true, omega * scene.background.permittivity, kLossFactor * scene.background.conductivity, {}};
    d.passed = d.value >= d.threshold;
    d.detail = "omega*eps_b / sigma_b = " +
               (scene.background.conductivity > 0.0 ? detail::format_double(d.value / scene.background.conductivity)
                                                     : std::string("inf"));
    out.push_back(d);
  }
  {
    const double wavelength = 2.0 * std::numbers::pi / k_bw.value.real();
    double worst = 0.0;
    for (const auto& a : scene.anomalies)
      worst = std::max(worst, 2.0 * a.radius * std::sqrt(a.medium.permittivity / scene.background.permittivity));
    Diagnostic d{"size", worst < wavelength, worst, wavelength,
                 "electrical diameter vs background wavelength " + detail::format_double(wavelength) + " m"};
    out.push_back(d);
  }
  {
    const double need = kFarFieldFactor * std::max(1.0 / (4.0 * std::abs(k_bw.value)), 1.0 / (4.0 * std::abs(k_aw.value)));
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& a : scene.anomalies)
      for (const auto& p : scene.array.positions()) closest = std::min(closest, distance(p, a.center));
    if (scene.anomalies.empty()) closest = scene.array.radius();
    Diagnostic d{"far_field", closest >= need, closest, need,
                 "closest antenna-to-anomaly distance; antenna-to-ROI-boundary gap is " +
                     detail::format_double(scene.array.radius() - scene.roi_radius) + " m"};
    out.push_back(d);
  }
  return out;
}

/// Reference configuration: 1 GHz, 16 antennas on 0.09 m, ROI 0.085 m, (20 eps0, 0.2 S/m).
inline Scene default_scene() {
  Scene s;
  s.frequency = 1e9;
  s.background = {20.0 * kVacuumPermittivity, 0.2, kBackgroundPermeability};
  s.roi_radius = 0.085;
  s.array = uniform_circular_array(16, 0.09);
  return s;
}

inline Anomaly first_anomaly() {
  return {{0.01, 0.03}, 0.01, {55.0 * kVacuumPermittivity, 1.2, kBackgroundPermeability}};
}

inline Anomaly second_anomaly() {
  return {{-0.04, -0.02}, 0.01, {45.0 * kVacuumPermittivity, 1.0, kBackgroundPermeability}};
}

}  // namespace bornmusic
