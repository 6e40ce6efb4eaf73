#pragma once

// Experiment configuration: INI-style sections of key = value pairs.
//
//   [experiment]  preset, output, seed
//   [scene]       frequency (Hz), roi_radius (m)
//   [background]  permittivity_rel | permittivity, conductivity, permeability
//   [array]       count, radius
//   [anomalyK]    x, y, radius, permittivity_rel | permittivity, conductivity, permeability
//   [sweep]       kind (permeability|permittivity|conductivity), ratios (comma list)
//   [imaging]     resolution, mode, variant, signal_dim, threshold_ratio, ceiling, peaks
//   [noise]       snr_db
//
// Missing keys keep the defaults (1 GHz, 16 antennas on 0.09 m, ROI 0.085 m,
// background (20 eps0, 0.2 S/m), one anomaly at (0.01, 0.03)). A preset replaces the
// sweep and anomaly list; [anomalyK] sections, when present, replace the anomaly list.

#include <bornmusic/errors.hpp>
#include <bornmusic/forward.hpp>
#include <bornmusic/music.hpp>
#include <bornmusic/scene.hpp>
#include <bornmusic/theory.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace bornmusic {

struct ExperimentConfig {
  Scene scene;
  int resolution = 128;
  MismatchKind kind = MismatchKind::permeability;
  std::vector<double> ratios{1.0};
  FieldMode mode = FieldMode::full_hankel;
  TestVectorVariant variant = TestVectorVariant::exact_field;
  std::optional<int> signal_dim;
  double threshold_ratio = kDefaultThresholdRatio;
  double ceiling = kDefaultCeiling;
  std::optional<int> peak_count;  // defaults to the number of anomalies
  std::optional<double> snr_db;   // noiseless when absent
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::string preset;

  int peaks() const { return peak_count.value_or(std::max<int>(1, static_cast<int>(scene.anomalies.size()))); }
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig-mu-single",  "fig-mu-double",    "fig-eps-single",
                                              "fig-eps-double", "fig-sigma-single", "fig-sigma-double"};
  return names;
}

/// Named sweeps: permeability and permittivity use {1, 2, 10, 0.5, 0.2,
/// 0.1}, conductivity uses {1, 2, 10, 20, 0.2, 0.1}; "double" adds the second anomaly.
inline void apply_preset(ExperimentConfig& cfg, const std::string& name) {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ConfigError("experiment.preset", "unknown preset '" + name + "'");
  if (name.starts_with("fig-mu")) {
    cfg.kind = MismatchKind::permeability;
    cfg.ratios = {1.0, 2.0, 10.0, 0.5, 0.2, 0.1};
  } else if (name.starts_with("fig-eps")) {
    cfg.kind = MismatchKind::permittivity;
    cfg.ratios = {1.0, 2.0, 10.0, 0.5, 0.2, 0.1};
  } else {
    cfg.kind = MismatchKind::conductivity;
    cfg.ratios = {1.0, 2.0, 10.0, 20.0, 0.2, 0.1};
  }
  cfg.scene.anomalies = {first_anomaly()};
  if (name.ends_with("double")) cfg.scene.anomalies.push_back(second_anomaly());
  cfg.preset = name;
}

inline ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.scene = default_scene();
  cfg.scene.anomalies = {first_anomaly()};
  return cfg;
}

/// Field-level checks; throws ConfigError.
inline void validate_config(const ExperimentConfig& cfg) {
  check_scene(cfg.scene);
  if (cfg.resolution < 16 || cfg.resolution > 2048) throw ConfigError("imaging.resolution", "must lie in [16, 2048]");
  if (cfg.ratios.empty()) throw ConfigError("sweep.ratios", "at least one ratio is required");
  for (double r : cfg.ratios)
    if (!std::isfinite(r) || r <= 0.0) throw ConfigError("sweep.ratios", "ratios must be finite and positive");
  if (cfg.signal_dim && (*cfg.signal_dim < 1 || *cfg.signal_dim > cfg.scene.array.count()))
    throw ConfigError("imaging.signal_dim", "must lie in [1, N]");
  if (!(cfg.threshold_ratio >= 0.0) || cfg.threshold_ratio > 1.0)
    throw ConfigError("imaging.threshold_ratio", "must lie in [0, 1]");
  if (!(cfg.ceiling > 1.0)) throw ConfigError("imaging.ceiling", "must exceed 1");
  if (cfg.peak_count && *cfg.peak_count < 1) throw ConfigError("imaging.peaks", "must be at least 1");
  if (cfg.snr_db && std::isnan(*cfg.snr_db)) throw ConfigError("noise.snr_db", "must be a number");
  if (cfg.output_dir.empty()) throw ConfigError("experiment.output", "must not be empty");
}

namespace detail {

using boost::property_tree::ptree;

inline double as_double(const ptree& section, const std::string& sec, const std::string& key) {
  const std::string text = section.get<std::string>(key);
  std::string t = text;
  std::erase(t, ' ');
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(sec + "." + key, "not a number: '" + text + "'");
  }
}

inline long long as_integer(const ptree& section, const std::string& sec, const std::string& key) {
  const double v = as_double(section, sec, key);
  if (!std::isfinite(v) || v != std::floor(v)) throw ConfigError(sec + "." + key, "must be an integer");
  return static_cast<long long>(v);
}

inline std::vector<double> as_list(const ptree& section, const std::string& sec, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(section.get<std::string>(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::erase(item, ' ');
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(sec + "." + key, "not a number: '" + item + "'");
    }
  }
  return out;
}

inline void check_keys(const ptree& section, const std::string& sec, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section) {
    if (!value.empty()) throw ConfigError(sec + "." + key, "unexpected nested section");
    if (!allowed.count(key)) throw ConfigError(sec + "." + key, "unknown key");
  }
}

inline void read_medium(const ptree& section, const std::string& sec, Medium& m) {
  if (section.count("permittivity_rel") && section.count("permittivity"))
    throw ConfigError(sec + ".permittivity", "give either permittivity or permittivity_rel, not both");
  if (section.count("permittivity_rel"))
    m.permittivity = as_double(section, sec, "permittivity_rel") * kVacuumPermittivity;
  if (section.count("permittivity")) m.permittivity = as_double(section, sec, "permittivity");
  if (section.count("conductivity")) m.conductivity = as_double(section, sec, "conductivity");
  if (section.count("permeability")) m.permeability = as_double(section, sec, "permeability");
}

}  // namespace detail

/// Parses and validates a configuration; an empty stream yields default_config().
inline ExperimentConfig parse_config(std::istream& is) {
  detail::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("", std::string("parse error: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  ExperimentConfig cfg = default_config();
  const detail::ptree empty;
  for (const auto& [name, section] : tree)
    if (section.empty() && !section.data().empty()) throw ConfigError(name, "key outside of any section");

  auto section = [&](const std::string& name) -> const detail::ptree& {
    const auto it = tree.find(name);
    return it == tree.not_found() ? empty : it->second;
  };

  std::map<int, const detail::ptree*> anomaly_sections;
  for (const auto& [name, sec] : tree) {
    static const std::set<std::string> known{"experiment", "scene", "background", "array", "sweep", "imaging", "noise"};
    if (known.count(name)) continue;
    if (name.starts_with("anomaly") && name.size() > 7 &&
        std::all_of(name.begin() + 7, name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      anomaly_sections[std::stoi(name.substr(7))] = &sec;
      continue;
    }
    throw ConfigError(name, "unknown section");
  }

  const auto& exp = section("experiment");
  detail::check_keys(exp, "experiment", {"preset", "output", "seed"});
  if (exp.count("preset")) apply_preset(cfg, exp.get<std::string>("preset"));
  if (exp.count("output")) cfg.output_dir = exp.get<std::string>("output");
  if (exp.count("seed")) {
    const long long seed = detail::as_integer(exp, "experiment", "seed");
    if (seed < 0) throw ConfigError("experiment.seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }

  const auto& scene = section("scene");
  detail::check_keys(scene, "scene", {"frequency", "roi_radius"});
  if (scene.count("frequency")) cfg.scene.frequency = detail::as_double(scene, "scene", "frequency");
  if (scene.count("roi_radius")) cfg.scene.roi_radius = detail::as_double(scene, "scene", "roi_radius");

  const auto& bg = section("background");
  detail::check_keys(bg, "background", {"permittivity_rel", "permittivity", "conductivity", "permeability"});
  detail::read_medium(bg, "background", cfg.scene.background);

  const auto& arr = section("array");
  detail::check_keys(arr, "array", {"count", "radius"});
  if (arr.count("count") || arr.count("radius")) {
    const long long count = arr.count("count") ? detail::as_integer(arr, "array", "count") : cfg.scene.array.count();
    const double radius = arr.count("radius") ? detail::as_double(arr, "array", "radius") : cfg.scene.array.radius();
    if (count < 3 || count > 1024) throw ConfigError("array.count", "must lie in [3, 1024]");
    cfg.scene.array = uniform_circular_array(static_cast<int>(count), radius);
  }

  if (!anomaly_sections.empty()) {
    cfg.scene.anomalies.clear();
    for (const auto& [index, sec] : anomaly_sections) {
      const std::string name = "anomaly" + std::to_string(index);
      detail::check_keys(*sec, name, {"x", "y", "radius", "permittivity_rel", "permittivity", "conductivity", "permeability"});
      for (const char* key : {"x", "y", "radius"})
        if (!sec->count(key)) throw ConfigError(name + "." + key, "required");
      Anomaly a;
      a.center = {detail::as_double(*sec, name, "x"), detail::as_double(*sec, name, "y")};
      a.radius = detail::as_double(*sec, name, "radius");
      a.medium = cfg.scene.background;
      detail::read_medium(*sec, name, a.medium);
      cfg.scene.anomalies.push_back(a);
    }
  }

  const auto& sweep = section("sweep");
  detail::check_keys(sweep, "sweep", {"kind", "ratios"});
  if (sweep.count("kind")) cfg.kind = parse_mismatch_kind(sweep.get<std::string>("kind"));
  if (sweep.count("ratios")) cfg.ratios = detail::as_list(sweep, "sweep", "ratios");

  const auto& img = section("imaging");
  detail::check_keys(img, "imaging", {"resolution", "mode", "variant", "signal_dim", "threshold_ratio", "ceiling", "peaks"});
  if (img.count("resolution")) cfg.resolution = static_cast<int>(detail::as_integer(img, "imaging", "resolution"));
  if (img.count("mode")) cfg.mode = parse_field_mode(img.get<std::string>("mode"));
  if (img.count("variant")) cfg.variant = parse_test_vector_variant(img.get<std::string>("variant"));
  if (img.count("signal_dim")) cfg.signal_dim = static_cast<int>(detail::as_integer(img, "imaging", "signal_dim"));
  if (img.count("threshold_ratio")) cfg.threshold_ratio = detail::as_double(img, "imaging", "threshold_ratio");
  if (img.count("ceiling")) cfg.ceiling = detail::as_double(img, "imaging", "ceiling");
  if (img.count("peaks")) cfg.peak_count = static_cast<int>(detail::as_integer(img, "imaging", "peaks"));

  const auto& noise = section("noise");
  detail::check_keys(noise, "noise", {"snr_db"});
  if (noise.count("snr_db")) cfg.snr_db = detail::as_double(noise, "noise", "snr_db");

  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot open config file " + path.string());
  return parse_config(f);
}

}  // namespace bornmusic
