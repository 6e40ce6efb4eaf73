#pragma once

// Mismatch sweeps: one scattering matrix from the true background, one imaging map per
// applied background, with CSV/PGM artifacts and a JSON report.

#include <bornmusic/config.hpp>
#include <bornmusic/errors.hpp>
#include <bornmusic/forward.hpp>
#include <bornmusic/io.hpp>
#include <bornmusic/music.hpp>
#include <bornmusic/scene.hpp>
#include <bornmusic/theory.hpp>

#include <json.hpp>  // vendored nlohmann::json

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bornmusic {

struct RatioRecord {
  double ratio = 1.0;
  Wavenumber k_aw;
  std::vector<double> singular_values;
  int signal_dim = 0;
  std::vector<Peak> peaks;
  std::vector<Point2> predicted;       // one per anomaly
  std::vector<double> peak_error_m;     // predicted location to the nearest extracted peak
  std::vector<double> peak_error_cells;
  std::optional<MapComparison> theory;  // single-anomaly scenes only
  std::optional<double> c_identity;     // single-anomaly scenes only
  std::vector<Diagnostic> diagnostics;
  std::string imaging_csv, norm_csv, pgm;
  double seconds = 0.0;  // wall time; kept out of the JSON so reports are reproducible
};

struct RunReport {
  ExperimentConfig config;
  Wavenumber k_bw;
  double cell_size = 0.0;
  std::vector<RatioRecord> records;
  std::filesystem::path report_path;
  double seconds = 0.0;
};

inline ImagingGrid experiment_grid(const ExperimentConfig& cfg) {
  return ImagingGrid(cfg.resolution, cfg.scene.roi_radius, cfg.scene.roi_radius);
}

namespace detail {

using nlohmann::ordered_json;

inline ordered_json to_json(Point2 p) { return ordered_json{{"x", p.x}, {"y", p.y}}; }
inline ordered_json to_json(cdouble z) { return ordered_json::array({z.real(), z.imag()}); }

inline ordered_json to_json(const Medium& m) {
  return ordered_json{{"permittivity", m.permittivity}, {"conductivity", m.conductivity}, {"permeability", m.permeability}};
}

inline ordered_json to_json(const MapComparison& c) {
  return ordered_json{{"rms", c.rms},
                      {"max_abs", c.max_abs},
                      {"argmin_distance_cells", c.argmin_distance_cells},
                      {"correlation", c.correlation},
                      {"cells", c.cells},
                      {"text", c.to_text()}};
}

inline ordered_json to_json(const RatioRecord& r, std::size_t index) {
  ordered_json peaks = ordered_json::array();
  for (const Peak& p : r.peaks)
    peaks.push_back({{"x", p.location.x}, {"y", p.location.y}, {"value", p.value}, {"row", p.cell.row}, {"col", p.cell.col}});
  ordered_json predicted = ordered_json::array();
  for (Point2 p : r.predicted) predicted.push_back(to_json(p));
  ordered_json diagnostics = ordered_json::array();
  for (const Diagnostic& d : r.diagnostics)
    diagnostics.push_back({{"name", d.name}, {"passed", d.passed}, {"value", d.value}, {"threshold", d.threshold}, {"detail", d.detail}});
  return ordered_json{{"index", index},
                      {"ratio", r.ratio},
                      {"k_aw", to_json(r.k_aw.value)},
                      {"singular_values", r.singular_values},
                      {"signal_dim", r.signal_dim},
                      {"peaks", peaks},
                      {"predicted_peaks", predicted},
                      {"peak_error_m", r.peak_error_m},
                      {"peak_error_cells", r.peak_error_cells},
                      {"theory_comparison", r.theory ? to_json(*r.theory) : ordered_json(nullptr)},
                      {"c_identity", r.c_identity ? ordered_json(*r.c_identity) : ordered_json(nullptr)},
                      {"diagnostics", diagnostics},
                      {"artifacts", {{"imaging_csv", r.imaging_csv}, {"norm_csv", r.norm_csv}, {"pgm", r.pgm}}}};
}

inline void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw NumericalError("run_experiment: non-finite " + what);
}

inline void check_record(const RatioRecord& r) {
  require_finite(r.k_aw.value.real(), "k_aw");
  require_finite(r.k_aw.value.imag(), "k_aw");
  for (double s : r.singular_values) require_finite(s, "singular value");
  for (const Peak& p : r.peaks) require_finite(p.value, "peak value");
  for (double e : r.peak_error_m) require_finite(e, "peak error");
  if (r.theory) {
    require_finite(r.theory->rms, "theory rms");
    require_finite(r.theory->correlation, "theory correlation");
  }
  if (r.c_identity) require_finite(*r.c_identity, "C-identity");
}

inline std::string artifact_stem(std::size_t index, MismatchKind kind, double ratio) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%02zu_%s_%g", index, std::string(to_string(kind)).c_str(), ratio);
  return buf;
}

// Removes every registered file unless released.
class ArtifactGuard {
 public:
  void add(std::filesystem::path p) { files_.push_back(std::move(p)); }
  void release() noexcept { files_.clear(); }
  ~ArtifactGuard() {
    std::error_code ec;
    for (const auto& f : files_)
      if (!std::filesystem::is_directory(f, ec)) std::filesystem::remove(f, ec);
  }

 private:
  std::vector<std::filesystem::path> files_;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error("write failed for " + path.string());
}

}  // namespace detail

/// Serialised report. Deterministic: no timestamps or wall times.
inline nlohmann::ordered_json report_json(const RunReport& report) {
  using detail::ordered_json;
  const ExperimentConfig& cfg = report.config;
  ordered_json anomalies = ordered_json::array();
  for (const Anomaly& a : cfg.scene.anomalies)
    anomalies.push_back({{"center", detail::to_json(a.center)}, {"radius", a.radius}, {"medium", detail::to_json(a.medium)}});
  ordered_json records = ordered_json::array();
  for (std::size_t i = 0; i < report.records.size(); ++i) records.push_back(detail::to_json(report.records[i], i));
  return ordered_json{
      {"report_version", 1},
      {"preset", cfg.preset},
      {"sweep", {{"kind", to_string(cfg.kind)}, {"ratios", cfg.ratios}}},
      {"imaging",
       {{"resolution", cfg.resolution},
        {"cell_size", report.cell_size},
        {"mode", to_string(cfg.mode)},
        {"variant", to_string(cfg.variant)},
        {"signal_dim", cfg.signal_dim ? ordered_json(*cfg.signal_dim) : ordered_json(nullptr)},
        {"threshold_ratio", cfg.threshold_ratio},
        {"ceiling", cfg.ceiling}}},
      {"noise",
       {{"snr_db", cfg.snr_db && std::isfinite(*cfg.snr_db) ? ordered_json(*cfg.snr_db) : ordered_json(nullptr)},
        {"seed", cfg.seed}}},
      {"scene",
       {{"frequency", cfg.scene.frequency},
        {"roi_radius", cfg.scene.roi_radius},
        {"background", detail::to_json(cfg.scene.background)},
        {"array", {{"count", cfg.scene.array.count()}, {"radius", cfg.scene.array.radius()}}},
        {"anomalies", anomalies}}},
      {"k_bw", detail::to_json(report.k_bw.value)},
      {"records", records}};
}

/// One record for one applied background. `data` is the measured matrix (from k_bw).
inline RatioRecord evaluate_ratio(const ExperimentConfig& cfg, const SubspaceDecomposition& data, const Wavenumber& k_bw,
                                  double ratio, std::optional<double> c_identity, ImageMap* imaging_out = nullptr,
                                  ImageMap* norm_out = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  const Scene& scene = cfg.scene;
  const ImagingGrid grid = experiment_grid(cfg);

  RatioRecord rec;
  rec.ratio = ratio;
  rec.k_aw = applied_wavenumber(scene.background, scene.omega(), {cfg.kind, ratio});
  rec.singular_values = data.singular_values;
  rec.diagnostics = validate_scene(scene, rec.k_aw);

  ImagingOptions opts{cfg.variant, cfg.threshold_ratio, cfg.signal_dim, cfg.ceiling};
  ImagingResult result = imaging_map(data, rec.k_aw, grid, scene.array, opts);
  rec.signal_dim = result.signal_dim;
  rec.peaks = extract_peaks(result.imaging, cfg.peaks());

  for (const Anomaly& a : scene.anomalies) {
    const Point2 p = predicted_peak(k_bw, rec.k_aw, a.center);
    double best = std::numeric_limits<double>::infinity();
    for (const Peak& pk : rec.peaks) best = std::min(best, distance(pk.location, p));
    rec.predicted.push_back(p);
    rec.peak_error_m.push_back(best);
    rec.peak_error_cells.push_back(best / grid.cell_size());
  }

  if (scene.anomalies.size() == 1) {
    // The closed form describes the rank-one noise projector I - U_1 U_1^*.
    const TheoryContext ctx = make_theory_context(k_bw, rec.k_aw, scene.anomalies.front().center, scene.array);
    if (result.signal_dim == 1) {
      rec.theory = compare_maps(result.norm, ctx, grid);
    } else {
      ImagingOptions rank_one = opts;
      rank_one.signal_dim = 1;
      rec.theory = compare_maps(imaging_map(data, rec.k_aw, grid, scene.array, rank_one).norm, ctx, grid);
    }
  }
  rec.c_identity = c_identity;

  if (imaging_out) *imaging_out = std::move(result.imaging);
  if (norm_out) *norm_out = std::move(result.norm);
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::check_record(rec);
  return rec;
}

/// Measured matrix for the configured scene: built from k_bw in the configured mode, with
/// optional additive noise.
inline ScatteringMatrix measured_matrix(const ExperimentConfig& cfg) {
  const ScatteringMatrix k = scattering_matrix(cfg.scene, cfg.scene.background_wavenumber(), cfg.mode);
  return cfg.snr_db ? add_noise(k, *cfg.snr_db, cfg.seed) : k;
}

/// C (N-1)^2 from a noiseless asymptotic-mode matrix; empty for multi-anomaly scenes.
inline std::optional<double> scene_c_identity(const Scene& scene) {
  if (scene.anomalies.size() != 1) return std::nullopt;
  const Wavenumber k_bw = scene.background_wavenumber();
  const ScatteringMatrix k = scattering_matrix(scene, k_bw, FieldMode::asymptotic);
  const SubspaceDecomposition dec = svd_leading(k);
  return c_identity_check(k, scene, k_bw, dec.singular_values.front());
}

/// Runs the sweep and writes <stem>_imaging.csv, <stem>_norm.csv, <stem>.pgm per ratio
/// and report.json into cfg.output_dir. On failure every file written by this call is removed.
inline RunReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir))
    throw ConfigError("experiment.output", "cannot create directory " + cfg.output_dir.string());

  detail::ArtifactGuard guard;
  RunReport report;
  report.config = cfg;
  report.k_bw = cfg.scene.background_wavenumber();
  report.cell_size = experiment_grid(cfg).cell_size();

  const SubspaceDecomposition data = svd_leading(measured_matrix(cfg));
  const std::optional<double> c_identity = scene_c_identity(cfg.scene);

  for (std::size_t i = 0; i < cfg.ratios.size(); ++i) {
    ImageMap imaging(experiment_grid(cfg)), norm(experiment_grid(cfg));
    RatioRecord rec = evaluate_ratio(cfg, data, report.k_bw, cfg.ratios[i], c_identity, &imaging, &norm);

    const std::string stem = detail::artifact_stem(i, cfg.kind, cfg.ratios[i]);
    rec.imaging_csv = stem + "_imaging.csv";
    rec.norm_csv = stem + "_norm.csv";
    rec.pgm = stem + ".pgm";

    std::ostringstream img_csv, norm_csv;
    write_map_csv(img_csv, imaging, rec.k_aw, MapQuantity::imaging);
    write_map_csv(norm_csv, norm, rec.k_aw, MapQuantity::norm);
    guard.add(cfg.output_dir / rec.imaging_csv);
    detail::write_text_file(cfg.output_dir / rec.imaging_csv, img_csv.str());
    guard.add(cfg.output_dir / rec.norm_csv);
    detail::write_text_file(cfg.output_dir / rec.norm_csv, norm_csv.str());
    guard.add(cfg.output_dir / rec.pgm);
    render_pgm(imaging, cfg.output_dir / rec.pgm);
    report.records.push_back(std::move(rec));
  }

  report.report_path = cfg.output_dir / "report.json";
  guard.add(report.report_path);
  detail::write_text_file(report.report_path, report_json(report).dump(2) + "\n");
  guard.release();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

/// Theory comparison for a saved map (norm or imaging CSV) of a single-anomaly scene.
/// The map's own header supplies k_aw and the grid.
inline MapComparison compare_saved_map(const LoadedMap& saved, const ExperimentConfig& cfg) {
  if (cfg.scene.anomalies.size() != 1) throw ConfigError("anomaly", "theory comparison needs exactly one anomaly");
  const ImagingGrid& grid = saved.map.grid;
  ImageMap norm = saved.map;
  if (saved.quantity == MapQuantity::imaging) {
    const int n = grid.resolution();
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (!norm.masked(r, c)) {
          const double v = norm.at(r, c);
          if (!(v > 0.0)) throw DomainError("compare: imaging values must be positive");
          norm.at(r, c) = 1.0 / v;
        }
  }
  const double omega = cfg.scene.omega();
  const TheoryContext ctx = make_theory_context(cfg.scene.background_wavenumber(), Wavenumber{omega, saved.k_aw},
                                                cfg.scene.anomalies.front().center, cfg.scene.array);
  return compare_maps(norm, ctx, grid);
}

}  // namespace bornmusic
