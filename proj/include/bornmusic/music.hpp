#pragma once

// MUSIC-type imaging: noise-subspace projection of test vectors against the
// left singular vectors of the scattering matrix.

#include <bornmusic/errors.hpp>
#include <bornmusic/forward.hpp>
#include <bornmusic/linalg.hpp>
#include <bornmusic/parallel.hpp>
#include <bornmusic/scene.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bornmusic {

/// Sentinel stored in masked (outside-ROI) cells of an ImageMap.
inline constexpr double kMaskedValue = -1.0;
inline constexpr double kDefaultCeiling = 1e8;
inline constexpr double kDefaultThresholdRatio = 0.1;

struct SubspaceDecomposition {
  std::vector<double> singular_values;  // descending
  std::vector<CVector> left_vectors;    // left_vectors[j] pairs with singular_values[j]
  int signal_dim = 0;                   // 0 only for an all-zero matrix
  int sweeps = 0;
};

/// M = #{j : tau_j >= ratio * tau_1}.
inline int signal_subspace_dim(std::span<const double> singular_values, double threshold_ratio = kDefaultThresholdRatio) {
  if (singular_values.empty()) throw DomainError("signal_subspace_dim: empty singular value list");
  if (!(threshold_ratio >= 0.0)) throw DomainError("signal_subspace_dim: threshold ratio must be non-negative");
  const double lead = singular_values.front();
  if (!(lead > 0.0)) throw DegenerateDataError("signal_subspace_dim: leading singular value is zero");
  const double cut = threshold_ratio * lead;
  const auto m = std::count_if(singular_values.begin(), singular_values.end(), [&](double t) { return t >= cut; });
  return static_cast<int>(std::max<std::ptrdiff_t>(m, 1));
}

/// Singular values and left singular vectors of K from the Hermitian eigenproblem K K^*.
/// tau_j is taken as |K^* U_j|, the square root of the Rayleigh quotient of K K^* at U_j,
/// which keeps small singular values accurate to roughly eps * tau_1 instead of the
/// sqrt(eps) * tau_1 floor of sqrt(lambda_j).
inline SubspaceDecomposition svd_leading(const ComplexMatrix& k, int max_sweeps = 50) {
  if (k.rows() < 3) throw DomainError("svd_leading: at least 3 rows are required");
  const ComplexMatrix kh = k.adjoint();
  const HermitianEigen eig = hermitian_jacobi(k * kh, max_sweeps);
  const std::size_t n = eig.vectors.size();
  std::vector<double> tau(n);
  for (std::size_t j = 0; j < n; ++j) tau[j] = vector_norm(kh * std::span<const cdouble>(eig.vectors[j]));
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tau[a] > tau[b]; });

  SubspaceDecomposition d;
  d.sweeps = eig.sweeps;
  d.singular_values.reserve(n);
  d.left_vectors.reserve(n);
  for (std::size_t j : order) {
    d.singular_values.push_back(tau[j]);
    d.left_vectors.push_back(eig.vectors[j]);
  }
  d.signal_dim = d.singular_values.front() > 0.0 ? signal_subspace_dim(d.singular_values) : 0;
  return d;
}

inline SubspaceDecomposition svd_leading(const ScatteringMatrix& k, int max_sweeps = 50) {
  return svd_leading(k.entries, max_sweeps);
}

enum class TestVectorVariant { exact_field, plane_wave };

inline std::string_view to_string(TestVectorVariant v) {
  return v == TestVectorVariant::exact_field ? "exact_field" : "plane_wave";
}

inline TestVectorVariant parse_test_vector_variant(std::string_view s) {
  if (s == "exact_field" || s == "exact") return TestVectorVariant::exact_field;
  if (s == "plane_wave" || s == "plane") return TestVectorVariant::plane_wave;
  throw ConfigError("variant", "expected exact_field or plane_wave, got '" + std::string(s) + "'");
}

/// Unit test vector at r. exact_field normalises the incident fields u(k, a_n, r);
/// plane_wave is e^{i k theta_n . r} / sqrt(N).
inline CVector test_vector(const Wavenumber& k_aw, Point2 r, const AntennaArray& array,
                           TestVectorVariant variant = TestVectorVariant::exact_field,
                           std::optional<double> roi_radius = std::nullopt) {
  const double limit = roi_radius.value_or(array.radius());
  if (!(norm(r) <= limit)) throw DomainError("test_vector: point lies outside the region of interest");
  const int n = array.count();
  CVector w(static_cast<std::size_t>(n));
  if (variant == TestVectorVariant::plane_wave) {
    const cdouble i(0.0, 1.0);
    for (int a = 0; a < n; ++a) w[static_cast<std::size_t>(a)] = std::exp(i * k_aw.value * dot(array.direction(a), r));
  } else {
    for (int a = 0; a < n; ++a) w[static_cast<std::size_t>(a)] = incident_field(k_aw, array.position(a), r);
  }
  const double len = vector_norm(w);
  for (auto& v : w) v /= len;
  return w;
}

/// |W - sum_{j < M} U_j <U_j, W>|.
inline double projection_norm(const SubspaceDecomposition& dec, std::span<const cdouble> w, int signal_dim) {
  if (dec.left_vectors.empty() || dec.left_vectors.front().size() != w.size())
    throw DomainError("projection_norm: dimension mismatch");
  if (signal_dim < 0 || signal_dim > static_cast<int>(dec.left_vectors.size()))
    throw DomainError("projection_norm: signal dimension out of range");
  CVector residual(w.begin(), w.end());
  for (int j = 0; j < signal_dim; ++j) {
    const CVector& u = dec.left_vectors[static_cast<std::size_t>(j)];
    const cdouble c = inner(u, w);
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= c * u[i];
  }
  return vector_norm(residual);
}

inline double projection_norm(const SubspaceDecomposition& dec, std::span<const cdouble> w) {
  return projection_norm(dec, w, dec.signal_dim);
}

/// Square raster over [-L, L]^2; row index increases with y, column with x.
class ImagingGrid {
 public:
  ImagingGrid() = default;
  ImagingGrid(int resolution, double half_width, double roi_radius)
      : resolution_(resolution), half_width_(half_width), roi_radius_(roi_radius) {
    if (resolution < 1) throw ConfigError("grid.resolution", "must be at least 1");
    if (!(half_width > 0.0)) throw ConfigError("grid.half_width", "must be positive");
    if (!(roi_radius > 0.0)) throw ConfigError("grid.roi_radius", "must be positive");
  }

  int resolution() const noexcept { return resolution_; }
  double half_width() const noexcept { return half_width_; }
  double roi_radius() const noexcept { return roi_radius_; }
  double cell_size() const noexcept { return 2.0 * half_width_ / resolution_; }
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(resolution_) * resolution_; }
  std::size_t index(int row, int col) const noexcept { return static_cast<std::size_t>(row) * resolution_ + col; }

  Point2 center(int row, int col) const noexcept {
    const double h = cell_size();
    return {-half_width_ + (col + 0.5) * h, -half_width_ + (row + 0.5) * h};
  }
  bool inside(int row, int col) const noexcept { return norm(center(row, col)) <= roi_radius_; }

  friend bool operator==(const ImagingGrid&, const ImagingGrid&) = default;

 private:
  int resolution_ = 0;
  double half_width_ = 0.0;
  double roi_radius_ = 0.0;
};

struct CellIndex {
  int row = 0;
  int col = 0;
  friend bool operator==(CellIndex, CellIndex) = default;
};

/// Scalar field over an ImagingGrid; masked cells hold kMaskedValue.
struct ImageMap {
  ImagingGrid grid;
  std::vector<double> values;

  explicit ImageMap(ImagingGrid g = {}) : grid(g), values(g.cell_count(), kMaskedValue) {}

  double at(int row, int col) const { return values[grid.index(row, col)]; }
  double& at(int row, int col) { return values[grid.index(row, col)]; }
  bool masked(int row, int col) const { return !grid.inside(row, col); }

  /// Unmasked cell with the largest (or smallest) value; ties go to the smallest (row, col).
  CellIndex argmax() const { return extremum(true); }
  CellIndex argmin() const { return extremum(false); }

 private:
  CellIndex extremum(bool largest) const {
    std::optional<CellIndex> best;
    double best_value = 0.0;
    const int n = grid.resolution();
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (masked(r, c)) continue;
        const double v = at(r, c);
        if (!best || (largest ? v > best_value : v < best_value)) {
          best = CellIndex{r, c};
          best_value = v;
        }
      }
    if (!best) throw DomainError("ImageMap: no unmasked cells");
    return *best;
  }
};

struct ImagingOptions {
  TestVectorVariant variant = TestVectorVariant::exact_field;
  double threshold_ratio = kDefaultThresholdRatio;
  std::optional<int> signal_dim;  // overrides the threshold rule
  double ceiling = kDefaultCeiling;
};

struct ImagingResult {
  ImageMap imaging;  // 1 / |P_noise W|, clipped at the ceiling
  ImageMap norm;     // |P_noise W|, unclipped
  SubspaceDecomposition decomposition;
  int signal_dim = 0;
};

inline ImagingResult imaging_map(const SubspaceDecomposition& dec, const Wavenumber& k_aw, const ImagingGrid& grid,
                                 const AntennaArray& array, const ImagingOptions& options = {}) {
  if (grid.resolution() < 16) throw ConfigError("grid.resolution", "imaging requires at least 16 cells per axis");
  if (static_cast<int>(dec.left_vectors.size()) != array.count())
    throw DomainError("imaging_map: decomposition size does not match the array");
  int m = 0;
  if (options.signal_dim) {
    m = *options.signal_dim;
    if (m < 1 || m > array.count()) throw ConfigError("signal_dim", "must lie in [1, N]");
  } else {
    m = signal_subspace_dim(dec.singular_values, options.threshold_ratio);
  }

  ImagingResult out{ImageMap(grid), ImageMap(grid), dec, m};
  const int n = grid.resolution();
  detail::parallel_for(n, [&](int row) {
    for (int col = 0; col < n; ++col) {
      if (!grid.inside(row, col)) continue;
      const CVector w = test_vector(k_aw, grid.center(row, col), array, options.variant, grid.roi_radius());
      const double p = projection_norm(dec, w, m);
      out.norm.at(row, col) = p;
      out.imaging.at(row, col) = p > 1.0 / options.ceiling ? 1.0 / p : options.ceiling;
    }
  });
  return out;
}

/// Imaging function 1/|P_noise W(k_aw, r)| over the grid.
inline ImagingResult imaging_map(const ScatteringMatrix& k, const Wavenumber& k_aw, const ImagingGrid& grid,
                                 const AntennaArray& array, const ImagingOptions& options = {}) {
  return imaging_map(svd_leading(k), k_aw, grid, array, options);
}

struct Peak {
  Point2 location;
  double value = 0.0;
  CellIndex cell;
};

/// Greedy selection among local maxima (cells not exceeded by any unmasked 8-neighbour)
/// with non-maximum suppression: an accepted peak excludes every cell within
/// `suppression_cells` cell widths. Ordered by value, ties by (row, col).
inline std::vector<Peak> extract_peaks(const ImageMap& map, int count, double suppression_cells = 4.0) {
  if (count < 1) throw DomainError("extract_peaks: count must be at least 1");
  const int n = map.grid.resolution();
  std::vector<CellIndex> candidates;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (map.masked(r, c)) continue;
      const double v = map.at(r, c);
      bool local_max = true;
      for (int dr = -1; dr <= 1 && local_max; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if ((dr == 0 && dc == 0) || rr < 0 || cc < 0 || rr >= n || cc >= n || map.masked(rr, cc)) continue;
          if (map.at(rr, cc) > v) {
            local_max = false;
            break;
          }
        }
      if (local_max) candidates.push_back({r, c});
    }
  if (candidates.empty()) throw DomainError("extract_peaks: no unmasked cells");

  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](CellIndex a, CellIndex b) { return map.at(a.row, a.col) > map.at(b.row, b.col); });
  std::vector<Peak> peaks;
  const double r2 = suppression_cells * suppression_cells;
  for (const auto& cand : candidates) {
    const bool suppressed = std::any_of(peaks.begin(), peaks.end(), [&](const Peak& p) {
      const double dr = p.cell.row - cand.row;
      const double dc = p.cell.col - cand.col;
      return dr * dr + dc * dc <= r2;
    });
    if (suppressed) continue;
    peaks.push_back({map.grid.center(cand.row, cand.col), map.at(cand.row, cand.col), cand});
    if (static_cast<int>(peaks.size()) == count) break;
  }
  return peaks;
}

/// Distance from the centre of `cell` to `p`, in cell widths.
inline double cell_distance(const ImagingGrid& grid, CellIndex cell, Point2 p) {
  return distance(grid.center(cell.row, cell.col), p) / grid.cell_size();
}

}  // namespace bornmusic
