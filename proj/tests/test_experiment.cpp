#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "varops/experiment.hpp"

using namespace varops;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.dim = 1;
  cfg.grid_p = 64;
  cfg.grid_l = 10.0;
  cfg.battery.trig_degree = 8;
  cfg.battery.trig_count = 1;
  cfg.family.center_stride = 8;
  return cfg;
}

}  // namespace

TEST_CASE("experiment names round-trip") {
  for (ExperimentKind kind : all_experiments())
    CHECK(experiment_from_name(experiment_name(kind)) == kind);
  CHECK_THROWS_AS(experiment_from_name("no-such-thing"), std::invalid_argument);
}

TEST_CASE("config serialize -> parse -> serialize is a fixed point") {
  ExperimentConfig cfg = small_config();
  cfg.kernel = "poisson";
  cfg.rho_list = {2.5, 3.25};
  cfg.q = 1.75;
  cfg.seed = 987654321;
  cfg.out_dir = "results/run1";
  cfg.strict = true;
  const std::string once = cfg.serialize();
  const std::string twice = ExperimentConfig::parse(once).serialize();
  CHECK(once == twice);
  CHECK(ExperimentConfig::parse(once).hash() == cfg.hash());

  // comments and blank lines are tolerated
  const auto parsed = ExperimentConfig::parse("# comment\n\nq = 3.5\nkernel = bump\n");
  CHECK(parsed.q == 3.5);
  CHECK(parsed.kernel == "bump");
}

TEST_CASE("invalid configs produce structured errors") {
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("nonsense_key = 1\n"),
                       doctest::Contains("unknown key"), std::invalid_argument);

  ExperimentConfig cfg = small_config();
  cfg.dim = 7;
  cfg.q = 0.5;
  cfg.rho_list = {1.5};
  try {
    cfg.validate();
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("dim") != std::string::npos);
    CHECK(msg.find("q must exceed 1") != std::string::npos);
    CHECK(msg.find("rho") != std::string::npos);
  }
}

TEST_CASE("oracle suite passes on a 64-point grid") {
  const auto rep = run_experiment(small_config(), ExperimentKind::oracle_suite);
  for (const auto& c : rep.checks) {
    INFO(c.name, " value=", c.value);
    CHECK(c.status != CheckResult::Status::failed);
  }
  CHECK(rep.passed(true));
  CHECK(rep.wall_seconds < 10.0);
}

TEST_CASE("runs are deterministic given the seed") {
  ExperimentConfig cfg = small_config();
  auto a = run_experiment(cfg, ExperimentKind::oracle_suite);
  auto b = run_experiment(cfg, ExperimentKind::oracle_suite);
  a.wall_seconds = b.wall_seconds = 0.0;  // timing is metadata, not a result
  CHECK(a.to_json(false) == b.to_json(false));
}

TEST_CASE("plot data emission writes per-series CSVs") {
  const auto dir = std::filesystem::temp_directory_path() / "varops_plots";
  std::filesystem::remove_all(dir);

  // empty report: header-only checks.csv
  RunReport empty;
  empty.series.push_back({"empty_series", {"x", "y"}, {}});
  emit_plot_data(empty, dir);
  {
    std::ifstream in(dir / "checks.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "name,value,threshold,status");
    std::string rest;
    CHECK(!std::getline(in, rest));
  }
  {
    std::ifstream in(dir / "empty_series.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,y");
  }

  RunReport rep;
  rep.checks.push_back({"alpha", 1.0, 2.0, CheckResult::Status::passed, ""});
  rep.series.push_back({"curve", {"x", "y"}, {{0.0, 1.0}, {1.0, 2.0}}});
  emit_plot_data(rep, dir);
  CHECK(std::filesystem::exists(dir / "curve.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("constant-input experiments skip instead of failing") {
  ExperimentConfig cfg = small_config();
  cfg.grid_p = 32;
  cfg.battery.trig_degree = 4;
  cfg.battery.trig_count = 0;
  cfg.battery.include_constant = true;
  const auto rep = run_experiment(cfg, ExperimentKind::bmo_lemma);
  bool saw_skip = false;
  for (const auto& c : rep.checks) {
    CHECK(c.status != CheckResult::Status::failed);
    if (c.status == CheckResult::Status::skipped) saw_skip = true;
  }
  CHECK(saw_skip);
  CHECK(rep.passed(false));
}

TEST_CASE("report JSON carries checks and series") {
  RunReport rep;
  rep.experiment = "demo";
  rep.config_hash = 0xabcdef;
  rep.checks.push_back({"finite_thing", 1.5, 2.0, CheckResult::Status::passed, "note"});
  rep.checks.push_back({"bad_thing", 3.0, 2.0, CheckResult::Status::failed, ""});
  rep.series.push_back({"s", {"a"}, {{1.0}}});
  const std::string j = rep.to_json(false);
  CHECK(j.find("\"experiment\": \"demo\"") != std::string::npos);
  CHECK(j.find("finite_thing") != std::string::npos);
  CHECK(j.find("\"passed\": false") != std::string::npos);
  CHECK(!rep.passed(false));

  RunReport warn;
  warn.checks.push_back({"soft", 1.0, 0.5, CheckResult::Status::warning, ""});
  CHECK(warn.passed(false));
  CHECK(!warn.passed(true));  // strict promotes warnings
}
