#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "varops/battery.hpp"
#include "varops/grid.hpp"
#include "varops/norms.hpp"
#include "varops/operators.hpp"

namespace varops {

enum class ExperimentKind {
  kernel_bounds,
  bmo_lemma,
  l2_bound,
  lp_sweep,
  cotlar,
  bmo_blo_osc,
  bmo_blo_var,
  bmo_blo_maxdiff,
  oracle_suite,
};

std::string_view experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(std::string_view name);
std::vector<ExperimentKind> all_experiments();

struct TimeGridSpec {
  int count = 12;       // base scales K
  int refinement = 8;   // R sub-scales per interval
  double first = 1.0;   // t_1; dyadic spacing t_i = first * 2^(1-i)
  std::string spacing = "dyadic";
};

struct LacunarySpec {
  double delta = 2.0;
  int half_width = 8;              // M
  double center_scale = 1.0;       // a_0
  std::string ratio_mode = "strong";  // strong: ratios in [delta, delta^2]; plain: >= delta
  std::string weights = "ones";       // ones | alternating | random
};

struct BallFamilySpec {
  int per_octave = 4;
  std::size_t center_stride = 1;
};

struct ExperimentConfig {
  int dim = 1;
  int grid_p = 2048;
  double grid_l = 20.0;         // length units
  std::string kernel = "gaussian";
  std::string kernel_file;      // tabulated radial profile; overrides kernel
  TimeGridSpec time;
  LacunarySpec lacunary;
  std::vector<double> rho_list{2.5, 3.0, 4.0, 6.0};
  double q = 2.0;
  std::vector<double> p_list{1.5, 2.0, 4.0};
  BatterySpec battery;
  BallFamilySpec family;
  std::uint64_t seed = 2026;
  std::string out_dir = "out";
  bool strict = false;

  // Line-oriented "key = value" text, canonical key order and number format;
  // serialize(parse(serialize())) is byte-identical.
  std::string serialize() const;
  static ExperimentConfig parse(const std::string& text);
  std::uint64_t hash() const;
  // Throws std::invalid_argument listing every violated invariant.
  void validate() const;

  TimeGrid make_time_grid() const;
  LacunarySequence make_lacunary(int half_width) const;
  std::unique_ptr<Kernel> make_configured_kernel() const;
};

struct CheckResult {
  enum class Status { passed, failed, skipped, warning };
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Status status = Status::passed;
  std::string note;
};

struct Series {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct RunReport {
  std::string experiment;
  std::string config_text;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::vector<CheckResult> checks;
  std::vector<Series> series;

  // Pass iff nothing failed; strict mode also promotes warnings to failures.
  bool passed(bool strict) const;
  std::string to_json(bool strict) const;
};

RunReport run_experiment(const ExperimentConfig& cfg, ExperimentKind kind);

// One CSV per series plus checks.csv; an empty report yields header-only files.
void emit_plot_data(const RunReport& report, const std::filesystem::path& dir);

}  // namespace varops
