#pragma once

// Closed-form Bessel-series approximation of the imaging function under a
// mismatched background wavenumber, and comparison against empirical maps.

#include <bornmusic/errors.hpp>
#include <bornmusic/forward.hpp>
#include <bornmusic/music.hpp>
#include <bornmusic/parallel.hpp>
#include <bornmusic/scene.hpp>
#include <bornmusic/specfun.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <string>
#include <string_view>

namespace bornmusic {

enum class MismatchKind { permeability, permittivity, conductivity };

inline std::string_view to_string(MismatchKind k) {
  switch (k) {
    case MismatchKind::permeability: return "permeability";
    case MismatchKind::permittivity: return "permittivity";
    case MismatchKind::conductivity: return "conductivity";
  }
  return "permeability";
}

inline MismatchKind parse_mismatch_kind(std::string_view s) {
  if (s == "permeability" || s == "mu") return MismatchKind::permeability;
  if (s == "permittivity" || s == "eps") return MismatchKind::permittivity;
  if (s == "conductivity" || s == "sigma") return MismatchKind::conductivity;
  throw ConfigError("sweep.kind", "expected permeability, permittivity or conductivity, got '" + std::string(s) + "'");
}

/// Applied value = ratio * true value for one background parameter.
struct MismatchSpec {
  MismatchKind kind = MismatchKind::permeability;
  double ratio = 1.0;
};

/// Background medium with one parameter scaled by the mismatch ratio.
inline Medium applied_medium(const Medium& background, const MismatchSpec& spec) {
  if (!std::isfinite(spec.ratio) || spec.ratio <= 0.0) throw ConfigError("sweep.ratios", "ratios must be finite and positive");
  Medium m = background;
  switch (spec.kind) {
    case MismatchKind::permeability: m.permeability *= spec.ratio; break;
    case MismatchKind::permittivity: m.permittivity *= spec.ratio; break;
    case MismatchKind::conductivity: m.conductivity *= spec.ratio; break;
  }
  return m;
}

inline Wavenumber applied_wavenumber(const Medium& background, double omega, const MismatchSpec& spec) {
  return wavenumber(applied_medium(background, spec), omega);
}

/// Jacobi-Anger residual tolerance used to truncate the error series.
inline constexpr double kSeriesTolerance = 1e-10;

struct TheoryContext {
  Wavenumber k_bw;
  Wavenumber k_aw;
  Point2 r_star;
  AntennaArray array;
  int max_order = specfun::kMaxOrder;
  double c = 0.0;  // 1 / (N-1)^2
};

inline TheoryContext make_theory_context(const Wavenumber& k_bw, const Wavenumber& k_aw, Point2 r_star,
                                         const AntennaArray& array, int max_order = specfun::kMaxOrder) {
  const double nm1 = array.count() - 1.0;
  return {k_bw, k_aw, r_star, array, max_order, 1.0 / (nm1 * nm1)};
}

/// x = |k_aw r - k_bw r*| and its angle phi. The two complex components are treated as a
/// 4-real vector for the modulus; phi is the angle of the real parts.
struct BesselArgument {
  double x = 0.0;
  double phi = 0.0;
};

inline BesselArgument bessel_argument(const TheoryContext& ctx, Point2 r) {
  const cdouble vx = ctx.k_aw.value * r.x - ctx.k_bw.value * ctx.r_star.x;
  const cdouble vy = ctx.k_aw.value * r.y - ctx.k_bw.value * ctx.r_star.y;
  const double x = std::sqrt(std::norm(vx) + std::norm(vy));
  const double phi = (vx.real() == 0.0 && vy.real() == 0.0) ? 0.0 : std::atan2(vy.real(), vx.real());
  return {x, phi};
}

namespace detail {
// Returns J_0(x) and writes E into `series`.
inline double bessel_terms(const TheoryContext& ctx, Point2 r, cdouble& series) {
  const BesselArgument arg = bessel_argument(ctx, r);
  const int q_max = specfun::jacobi_anger_truncation(arg.x, kSeriesTolerance, ctx.max_order);
  const std::vector<double> j = specfun::bessel_j_sequence(q_max, arg.x);
  static constexpr cdouble kIPow[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  cdouble sum{};
  const int n = ctx.array.count();
  for (int a = 0; a < n; ++a) {
    const double psi = ctx.array.angles()[static_cast<std::size_t>(a)] - arg.phi;
    for (int q = 1; q <= q_max; ++q)
      sum += kIPow[q % 4] * (2.0 * j[static_cast<std::size_t>(q)] * std::cos(q * psi));
  }
  series = sum / static_cast<double>(n);
  return j[0];
}
}  // namespace detail

/// E(k_aw r, k_bw r*) = (1/N) sum_n sum_{q != 0} i^q J_q(x) e^{iq(theta_n - phi)}.
inline cdouble error_series(const TheoryContext& ctx, Point2 r) {
  cdouble e;
  detail::bessel_terms(ctx, r, e);
  return e;
}

/// J_0(x) + E.
inline cdouble bessel_sum(const TheoryContext& ctx, Point2 r) {
  cdouble e;
  const double j0 = detail::bessel_terms(ctx, r, e);
  return j0 + e;
}

inline double theorem_prefactor(int n) {
  const double a = static_cast<double>(n) * n - 2.0 * n;
  return (a + 1.0) / a;
}

/// Closed-form imaging function ((N^2-2N+1)/(N^2-2N)) (1 - |J_0 + E|^2)^{-1/2}.
inline ImageMap theorem1_map(const TheoryContext& ctx, const ImagingGrid& grid, double ceiling = kDefaultCeiling) {
  ImageMap out(grid);
  const double pref = theorem_prefactor(ctx.array.count());
  const int n = grid.resolution();
  detail::parallel_for(n, [&](int row) {
    for (int col = 0; col < n; ++col) {
      if (!grid.inside(row, col)) continue;
      const double s = 1.0 - std::norm(bessel_sum(ctx, grid.center(row, col)));
      const double f = s > 0.0 ? pref / std::sqrt(s) : ceiling;
      out.at(row, col) = std::min(f, ceiling);
    }
  });
  return out;
}

/// Closed-form noise-projection norm ((N^2-2N)/(N^2-2N+1)) (1 - |J_0 + E|^2)^{1/2}.
inline ImageMap theorem1_norm_map(const TheoryContext& ctx, const ImagingGrid& grid) {
  ImageMap out(grid);
  const double pref = 1.0 / theorem_prefactor(ctx.array.count());
  const int n = grid.resolution();
  detail::parallel_for(n, [&](int row) {
    for (int col = 0; col < n; ++col) {
      if (!grid.inside(row, col)) continue;
      const double s = 1.0 - std::norm(bessel_sum(ctx, grid.center(row, col)));
      out.at(row, col) = pref * std::sqrt(std::max(s, 0.0));
    }
  });
  return out;
}

/// Location at which the mismatched imaging function peaks: Re(k_bw / k_aw) r*.
inline Point2 predicted_peak(const Wavenumber& k_bw, const Wavenumber& k_aw, Point2 r_star) {
  if (k_aw.value == cdouble{}) throw DomainError("predicted_peak: k_aw is zero");
  return (k_bw.value / k_aw.value).real() * r_star;
}

struct MapComparison {
  double rms = 0.0;
  double max_abs = 0.0;
  double argmin_distance_cells = 0.0;
  double correlation = 0.0;
  std::size_t cells = 0;

  /// "key: value" lines.
  std::string to_text() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "rms: %.10g\nmax_abs: %.10g\nargmin_distance_cells: %.10g\ncorrelation: %.10g\ncells: %zu\n",
                  rms, max_abs, argmin_distance_cells, correlation, cells);
    return buf;
  }
};

/// Cellwise statistics of a - b over unmasked cells.
inline MapComparison compare_maps(const ImageMap& a, const ImageMap& b) {
  if (!(a.grid == b.grid)) throw DomainError("compare_maps: grids differ");
  MapComparison out;
  const int n = a.grid.resolution();
  double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0, sdd = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (a.masked(r, c)) continue;
      const double x = a.at(r, c);
      const double y = b.at(r, c);
      const double d = x - y;
      sdd += d * d;
      out.max_abs = std::max(out.max_abs, std::abs(d));
      sa += x;
      sb += y;
      saa += x * x;
      sbb += y * y;
      sab += x * y;
      ++out.cells;
    }
  if (out.cells == 0) throw DomainError("compare_maps: no unmasked cells");
  const double m = static_cast<double>(out.cells);
  out.rms = std::sqrt(sdd / m);
  const double cov = sab - sa * sb / m;
  const double va = saa - sa * sa / m;
  const double vb = sbb - sb * sb / m;
  out.correlation = (va > 0.0 && vb > 0.0) ? cov / std::sqrt(va * vb) : (va == vb && sdd == 0.0 ? 1.0 : 0.0);
  const CellIndex ia = a.argmin();
  const CellIndex ib = b.argmin();
  out.argmin_distance_cells = std::hypot(ia.row - ib.row, ia.col - ib.col);
  return out;
}

/// Empirical |P_noise W| map against the closed-form norm map on the same grid.
inline MapComparison compare_maps(const ImageMap& empirical_norm, const TheoryContext& ctx, const ImagingGrid& grid) {
  if (!(empirical_norm.grid == grid)) throw DomainError("compare_maps: grid mismatch");
  return compare_maps(empirical_norm, theorem1_norm_map(ctx, grid));
}

/// C (N-1)^2 with C = |alpha^2 O k_bw e^{-2 i k_bw R} / (32 R omega mu_b tau_1)|^2, the
/// modulus of the asymptotic scattering-matrix prefactor over tau_1. Equals 1 when the
/// background is lossless and the matrix is built in asymptotic mode.
inline double c_identity_check(const ScatteringMatrix& k_asym, const Scene& scene, const Wavenumber& k_bw, double tau1) {
  if (k_asym.mode != FieldMode::asymptotic) throw DomainError("c_identity_check: matrix must be built in asymptotic mode");
  if (scene.anomalies.size() != 1) throw DomainError("c_identity_check: exactly one anomaly is required");
  if (!(tau1 > 0.0)) throw DegenerateDataError("c_identity_check: tau_1 is zero");
  const Anomaly& a = scene.anomalies.front();
  const double r = scene.array.radius();
  const cdouble i(0.0, 1.0);
  const cdouble pref = a.radius * a.radius * contrast(a, scene.background, scene.omega()) * k_bw.value *
                       std::exp(-2.0 * i * k_bw.value * r) /
                       (32.0 * r * scene.omega() * scene.background.permeability * tau1);
  const double nm1 = k_asym.size() - 1.0;
  return std::norm(pref) * nm1 * nm1;
}

}  // namespace bornmusic
