// bornmusic: run mismatch sweeps, validate configs, compare saved maps with the closed form.
//
//   bornmusic run <config> [--preset NAME] [--out DIR] [--resolution N] [--mode full|asymptotic]
//                          [--variant exact|plane] [--signal-dim M] [--seed S]
//   bornmusic validate <config>
//   bornmusic compare <empirical.csv> <config>
//
// Exit codes: 0 success, 2 invalid configuration, 3 numerical or domain failure.

#include <bornmusic/config.hpp>
#include <bornmusic/experiment.hpp>
#include <bornmusic/io.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace bornmusic;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunOverrides {
  std::string preset, out, mode, variant;
  std::optional<int> resolution, signal_dim;
  std::optional<std::uint64_t> seed;
};

FieldMode cli_mode(const std::string& s) {
  if (s == "full") return FieldMode::full_hankel;
  return parse_field_mode(s);
}

TestVectorVariant cli_variant(const std::string& s) {
  if (s == "exact") return TestVectorVariant::exact_field;
  if (s == "plane") return TestVectorVariant::plane_wave;
  return parse_test_vector_variant(s);
}

void apply(ExperimentConfig& cfg, const RunOverrides& o) {
  if (!o.preset.empty()) apply_preset(cfg, o.preset);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.resolution) cfg.resolution = *o.resolution;
  if (!o.mode.empty()) cfg.mode = cli_mode(o.mode);
  if (!o.variant.empty()) cfg.variant = cli_variant(o.variant);
  if (o.signal_dim) cfg.signal_dim = *o.signal_dim;
  if (o.seed) cfg.seed = *o.seed;
  validate_config(cfg);
}

void print_diagnostics(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    std::printf("  %-9s %s  %.6g vs %.6g  %s\n", d.name.c_str(), d.passed ? "ok  " : "WARN", d.value, d.threshold,
                d.detail.c_str());
}

int cmd_run(const std::string& path, const RunOverrides& o) {
  ExperimentConfig cfg = load_config(path);
  apply(cfg, o);
  const RunReport report = run_experiment(cfg);
  std::printf("k_bw = %.6f%+.6fi, cell = %.4g m, %zu ratio(s)\n", report.k_bw.value.real(), report.k_bw.value.imag(),
              report.cell_size, report.records.size());
  for (const auto& r : report.records) {
    std::printf("ratio %-6g M=%d", r.ratio, r.signal_dim);
    for (std::size_t a = 0; a < r.predicted.size(); ++a)
      std::printf("  peak err %.2f cells (predicted %.5f, %.5f)", r.peak_error_cells[a], r.predicted[a].x, r.predicted[a].y);
    if (r.theory) std::printf("  theory rms %.4f", r.theory->rms);
    std::printf("  %.2fs\n", r.seconds);
  }
  std::printf("report: %s (%.2fs)\n", report.report_path.string().c_str(), report.seconds);
  return 0;
}

int cmd_validate(const std::string& path) {
  const ExperimentConfig cfg = load_config(path);
  std::printf("config ok: %zu anomaly(ies), N=%d, %zu ratio(s) of %s, resolution %d\n", cfg.scene.anomalies.size(),
              cfg.scene.array.count(), cfg.ratios.size(), std::string(to_string(cfg.kind)).c_str(), cfg.resolution);
  for (double ratio : cfg.ratios) {
    std::printf("ratio %g\n", ratio);
    print_diagnostics(validate_scene(cfg.scene, applied_wavenumber(cfg.scene.background, cfg.scene.omega(), {cfg.kind, ratio})));
  }
  return 0;
}

int cmd_compare(const std::string& csv, const std::string& path) {
  const ExperimentConfig cfg = load_config(path);
  std::ifstream f(csv);
  if (!f) throw ConfigError("csv", "cannot open " + csv);
  const LoadedMap saved = read_map_csv(f);
  std::fputs(compare_saved_map(saved, cfg).to_text().c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Born-approximation MUSIC imaging under background mismatch"};
  app.require_subcommand(1);

  std::string config, csv;
  RunOverrides o;
  auto* run = app.add_subcommand("run", "run a sweep and write maps and report.json");
  run->add_option("config", config, "configuration file")->required();
  run->add_option("--preset", o.preset, "named sweep preset");
  run->add_option("--out", o.out, "output directory");
  run->add_option("--resolution", o.resolution, "grid cells per axis");
  run->add_option("--mode", o.mode, "forward model")->check(CLI::IsMember({"full", "full_hankel", "asymptotic"}));
  run->add_option("--variant", o.variant, "test vector")->check(CLI::IsMember({"exact", "exact_field", "plane", "plane_wave"}));
  run->add_option("--signal-dim", o.signal_dim, "signal subspace dimension");
  run->add_option("--seed", o.seed, "noise seed");

  auto* validate = app.add_subcommand("validate", "check a configuration and print scene diagnostics");
  validate->add_option("config", config, "configuration file")->required();

  auto* compare = app.add_subcommand("compare", "compare a saved map with the closed form");
  compare->add_option("empirical", csv, "norm or imaging CSV")->required();
  compare->add_option("config", config, "configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, o);
    if (*validate) return cmd_validate(config);
    return cmd_compare(csv, config);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
}
