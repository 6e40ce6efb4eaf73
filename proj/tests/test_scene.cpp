#include <bornmusic/scene.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace bornmusic;
using cd = std::complex<double>;

namespace {

const Diagnostic& find(const std::vector<Diagnostic>& d, const std::string& name) {
  for (const auto& x : d)
    if (x.name == name) return x;
  throw std::runtime_error("missing diagnostic " + name);
}

}  // namespace

TEST(Wavenumber, ReferenceBackground) {
  const Scene s = default_scene();
  const Wavenumber k = s.background_wavenumber();
  // omega sqrt(mu (eps + i sigma / omega)) evaluated independently.
  const double w = 2.0 * std::numbers::pi * 1e9;
  const cd ref = w * std::sqrt(1.257e-6 * cd(20.0 * 8.854e-12, 0.2 / w));
  EXPECT_NEAR(std::abs(k.value - ref), 0.0, 1e-12 * std::abs(ref));
  EXPECT_NEAR(k.value.real(), 94.11644, 1e-5);
  EXPECT_NEAR(k.value.imag(), 8.39169, 1e-5);
  EXPECT_DOUBLE_EQ(k.omega, w);
}

TEST(Wavenumber, LosslessIsRealAndScalesWithSqrtMu) {
  const double w = 2.0 * std::numbers::pi * 3e8;
  const Medium m{4.0 * kVacuumPermittivity, 0.0, kBackgroundPermeability};
  const Wavenumber k = wavenumber(m, w);
  EXPECT_EQ(k.value.imag(), 0.0);
  EXPECT_DOUBLE_EQ(k.value.real(), w * std::sqrt(m.permeability * m.permittivity));
  Medium m4 = m;
  m4.permeability *= 4.0;
  EXPECT_EQ(wavenumber(m4, w).value.real(), 2.0 * k.value.real());
}

TEST(Wavenumber, PrincipalBranchAndSquareForRandomMedia) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> er(1.0, 80.0), sg(0.0, 5.0), mr(0.5, 4.0), f(1e7, 1e10);
  for (int i = 0; i < 1000; ++i) {
    const Medium m{er(rng) * kVacuumPermittivity, sg(rng), mr(rng) * kBackgroundPermeability};
    const double w = angular_frequency(f(rng));
    const Wavenumber k = wavenumber(m, w);
    const cd k2 = w * w * m.permeability * cd(m.permittivity, m.conductivity / w);
    EXPECT_GT(k.value.real(), 0.0);
    EXPECT_GE(k.value.imag(), 0.0);
    EXPECT_EQ(k.value.imag() == 0.0, m.conductivity == 0.0);
    EXPECT_LE(std::abs(k.value * k.value - k2), 1e-12 * std::abs(k2));
  }
}

TEST(Wavenumber, RejectsNonFiniteInputs) {
  const Medium good{kVacuumPermittivity, 0.0, kBackgroundPermeability};
  EXPECT_THROW(wavenumber(good, 0.0), DomainError);
  EXPECT_THROW(wavenumber(good, std::nan("")), DomainError);
  Medium bad = good;
  bad.permittivity = std::numeric_limits<double>::infinity();
  EXPECT_THROW(wavenumber(bad, 1e9), DomainError);
}

TEST(Array, SixteenElementLastAntennaOnXAxis) {
  const AntennaArray a = uniform_circular_array(16, 0.09);
  EXPECT_NEAR(a.position(15).x, 0.09, 1e-15);
  EXPECT_NEAR(a.position(15).y, 0.0, 1e-15);
}

TEST(Array, FourElementQuarterTurns) {
  const AntennaArray a = uniform_circular_array(4, 1.0);
  const Point2 want[] = {{0, 1}, {-1, 0}, {0, -1}, {1, 0}};
  for (int n = 0; n < 4; ++n) {
    EXPECT_NEAR(a.position(n).x, want[n].x, 1e-15);
    EXPECT_NEAR(a.position(n).y, want[n].y, 1e-15);
  }
}

TEST(Array, CentroidAtOriginAndRadiusExact) {
  for (int n : {3, 5, 8, 16, 31, 64})
    for (double r : {0.01, 0.09, 3.0}) {
      const AntennaArray a = uniform_circular_array(n, r);
      Point2 s{};
      for (const auto& p : a.positions()) {
        s = s + p;
        EXPECT_NEAR(norm(p), r, 1e-15 * r);
      }
      EXPECT_LE(norm(s), 1e-12 * r);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) EXPECT_NE(a.angles()[i], a.angles()[j]);
    }
}

TEST(Array, RotationAddsOffset) {
  const AntennaArray a = uniform_circular_array(8, 0.5).rotated(0.3);
  EXPECT_DOUBLE_EQ(a.offset(), 0.3);
  EXPECT_NEAR(a.angles()[0], 2.0 * std::numbers::pi / 8 + 0.3, 1e-15);
  EXPECT_NEAR(a.direction(2).x, std::cos(a.angles()[2]), 1e-15);
}

TEST(Array, RejectsDegenerateConfigurations) {
  EXPECT_THROW(uniform_circular_array(2, 1.0), ConfigError);
  EXPECT_THROW(uniform_circular_array(8, 0.0), ConfigError);
  EXPECT_THROW(uniform_circular_array(8, -1.0), ConfigError);
}

TEST(Contrast, ReferenceAnomaly) {
  const Scene s = default_scene();
  const cd o = contrast(first_anomaly(), s.background, s.omega());
  EXPECT_NEAR(o.real(), 1.75, 1e-12);
  EXPECT_NEAR(o.imag(), 1.0 / (s.omega() * 20.0 * kVacuumPermittivity), 1e-12);
  EXPECT_NEAR(o.imag(), 0.898774, 1e-6);
}

TEST(Contrast, NullAndLinear) {
  const Scene s = default_scene();
  Anomaly a{{0, 0}, 0.01, s.background};
  EXPECT_EQ(contrast(a, s.background, s.omega()), cd(0.0, 0.0));
  a.medium.permittivity = s.background.permittivity + 5.0 * kVacuumPermittivity;
  const cd one = contrast(a, s.background, s.omega());
  a.medium.permittivity = s.background.permittivity + 10.0 * kVacuumPermittivity;
  EXPECT_DOUBLE_EQ(contrast(a, s.background, s.omega()).real(), 2.0 * one.real());

  // Permittivity and conductivity parts add independently.
  Anomaly e{{0, 0}, 0.01, s.background}, g = e, both = e;
  e.medium.permittivity += 7.0 * kVacuumPermittivity;
  g.medium.conductivity += 0.4;
  both.medium.permittivity = e.medium.permittivity;
  both.medium.conductivity = g.medium.conductivity;
  const cd sum = contrast(e, s.background, s.omega()) + contrast(g, s.background, s.omega());
  EXPECT_EQ(contrast(both, s.background, s.omega()), sum);
}

TEST(Scene, StructuralChecks) {
  Scene s = default_scene();
  s.anomalies = {first_anomaly(), second_anomaly()};
  EXPECT_NO_THROW(check_scene(s));
  Scene t = s;
  t.anomalies[1].center = {0.015, 0.03};
  EXPECT_THROW(check_scene(t), ConfigError);
  t = s;
  t.anomalies[0].center = {0.08, 0.0};
  EXPECT_THROW(check_scene(t), ConfigError);
  t = s;
  t.array = uniform_circular_array(16, 0.08);
  EXPECT_THROW(check_scene(t), ConfigError);
  t = s;
  t.frequency = -1.0;
  EXPECT_THROW(check_scene(t), ConfigError);
}

TEST(ValidateScene, ReferenceConfigurationPasses) {
  Scene s = default_scene();
  s.anomalies = {first_anomaly()};
  const auto d = validate_scene(s, s.background_wavenumber());
  ASSERT_EQ(d.size(), 3u);
  for (const auto& x : d) EXPECT_TRUE(x.passed) << x.name << ": " << x.value << " vs " << x.threshold;
  EXPECT_NEAR(find(d, "loss").value / s.background.conductivity, 5.5631, 1e-4);
}

TEST(ValidateScene, LossyBackgroundWarns) {
  Scene s = default_scene();
  s.anomalies = {first_anomaly()};
  s.background.conductivity = s.omega() * s.background.permittivity;
  EXPECT_FALSE(find(validate_scene(s, s.background_wavenumber()), "loss").passed);
}

TEST(ValidateScene, ElectricallyLargeAnomalyWarns) {
  Scene s = default_scene();
  Anomaly a = first_anomaly();
  a.center = {0, 0};
  a.radius = s.roi_radius / 1.01;
  s.anomalies = {a};
  const Diagnostic& size = find(validate_scene(s, s.background_wavenumber()), "size");
  EXPECT_FALSE(size.passed);
  EXPECT_NEAR(size.threshold, 0.0668, 1e-4);
}

TEST(ValidateScene, AnomalyNearArrayFailsFarField) {
  Scene s = default_scene();
  Anomaly a = first_anomaly();
  a.center = {0.07, 0.0};
  a.radius = 0.005;
  s.anomalies = {a};
  const Diagnostic& ff = find(validate_scene(s, s.background_wavenumber()), "far_field");
  EXPECT_FALSE(ff.passed);
  EXPECT_NEAR(ff.value, 0.02, 1e-12);
}
