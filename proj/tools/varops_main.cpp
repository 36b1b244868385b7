// varops: verification experiments for oscillation, variation and maximal
// differential transforms built on convolution approximate identities.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "varops/experiment.hpp"

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> grid_p;
  std::optional<int> dim;
  std::optional<double> grid_l;
  std::optional<std::string> kernel;
  std::optional<std::string> kernel_file;
  std::optional<double> q;
  std::optional<int> lacunary_m;
  std::optional<std::string> weights;
  bool strict = false;
  bool emit_csv = true;
};

varops::ExperimentConfig resolve_config(const CliOverrides& o) {
  varops::ExperimentConfig cfg;
  if (!o.config_path.empty())
    cfg = varops::ExperimentConfig::parse(read_text_file(o.config_path));
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.grid_p) cfg.grid_p = *o.grid_p;
  if (o.dim) cfg.dim = *o.dim;
  if (o.grid_l) cfg.grid_l = *o.grid_l;
  if (o.kernel) cfg.kernel = *o.kernel;
  if (o.kernel_file) cfg.kernel_file = *o.kernel_file;
  if (o.q) cfg.q = *o.q;
  if (o.lacunary_m) cfg.lacunary.half_width = *o.lacunary_m;
  if (o.weights) cfg.lacunary.weights = *o.weights;
  if (o.strict) cfg.strict = true;
  return cfg;
}

int run_one(const varops::ExperimentConfig& cfg, varops::ExperimentKind kind,
            bool emit_csv) {
  const auto rep = varops::run_experiment(cfg, kind);
  const std::filesystem::path out_dir =
      std::filesystem::path(cfg.out_dir) / std::string(varops::experiment_name(kind));
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream json(out_dir / "report.json");
    json << rep.to_json(cfg.strict) << "\n";
  }
  {
    std::ofstream cfg_out(out_dir / "config.txt");
    cfg_out << cfg.serialize();
  }
  if (emit_csv) varops::emit_plot_data(rep, out_dir);

  int failed = 0;
  int warned = 0;
  int skipped = 0;
  for (const auto& c : rep.checks) {
    if (c.status == varops::CheckResult::Status::failed) ++failed;
    if (c.status == varops::CheckResult::Status::warning) ++warned;
    if (c.status == varops::CheckResult::Status::skipped) ++skipped;
  }
  const bool ok = rep.passed(cfg.strict);
  std::cout << (ok ? "[ok]   " : "[FAIL] ") << varops::experiment_name(kind) << ": "
            << rep.checks.size() << " checks (" << failed << " failed, " << warned
            << " warnings, " << skipped << " skipped), " << rep.wall_seconds << " s -> "
            << (out_dir / "report.json").string() << "\n";
  if (!ok)
    for (const auto& c : rep.checks)
      if (c.status == varops::CheckResult::Status::failed ||
          (cfg.strict && c.status == varops::CheckResult::Status::warning))
        std::cout << "       " << c.name << " = " << c.value << " (threshold "
                  << c.threshold << ")" << (c.note.empty() ? "" : " - " + c.note) << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "varops: empirical verification of oscillation, variation and maximal\n"
      "differential transform estimates over convolution approximate identities"};

  CliOverrides o;
  app.add_option("--config", o.config_path, "key = value config file");
  app.add_option("--seed", o.seed, "RNG seed (all randomness derives from it)");
  app.add_option("--out", o.out, "output directory for reports and CSV series");
  app.add_option("--grid-P", o.grid_p, "points per axis");
  app.add_option("--dim", o.dim, "dimension (1-3)");
  app.add_option("--grid-L", o.grid_l, "box half width, length units");
  app.add_option("--kernel", o.kernel, "gaussian | poisson | bump");
  app.add_option("--kernel-file", o.kernel_file,
                 "tabulated radial profile ('r value' lines, cubic spline)");
  app.add_option("--q", o.q, "exponent for the q-mean maximal function");
  app.add_option("--lacunary-M", o.lacunary_m, "lacunary half width M");
  app.add_option("--weights", o.weights, "ones | alternating | random");
  app.add_flag("--strict", o.strict, "treat stability warnings as failures");
  app.add_flag("!--no-csv", o.emit_csv, "skip CSV plot data");

  bool run_all = false;
  app.add_flag("--all", run_all, "run every experiment");
  std::vector<CLI::App*> subs;
  for (varops::ExperimentKind kind : varops::all_experiments()) {
    subs.push_back(app.add_subcommand(
        std::string(varops::experiment_name(kind)),
        "run the " + std::string(varops::experiment_name(kind)) + " experiment"));
  }
  auto* print_cfg = app.add_subcommand("print-config", "print the resolved config and exit");
  app.require_subcommand(0, 1);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve_config(o);
    cfg.validate();

    if (print_cfg->parsed()) {
      std::cout << cfg.serialize();
      return 0;
    }

    int rc = 0;
    bool ran = false;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (run_all || subs[i]->parsed()) {
        rc |= run_one(cfg, varops::all_experiments()[i], o.emit_csv);
        ran = true;
      }
    }
    if (!ran) {
      std::cout << app.help();
      return 2;
    }
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
