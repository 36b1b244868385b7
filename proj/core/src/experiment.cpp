#include "varops/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "varops/io.hpp"
#include "varops/parallel.hpp"
#include "varops/semigroup.hpp"

namespace varops {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::kernel_bounds, "kernel-bounds"},
    {ExperimentKind::bmo_lemma, "bmo-lemma"},
    {ExperimentKind::l2_bound, "l2-bound"},
    {ExperimentKind::lp_sweep, "lp-sweep"},
    {ExperimentKind::cotlar, "cotlar"},
    {ExperimentKind::bmo_blo_osc, "bmo-blo-osc"},
    {ExperimentKind::bmo_blo_var, "bmo-blo-var"},
    {ExperimentKind::bmo_blo_maxdiff, "bmo-blo-maxdiff"},
    {ExperimentKind::oracle_suite, "oracle-suite"},
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i]);
  }
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string_view experiment_name(ExperimentKind kind) {
  for (const auto& [k, n] : kKindNames)
    if (k == kind) return n;
  throw std::logic_error("unknown experiment kind");
}

ExperimentKind experiment_from_name(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw std::invalid_argument("unknown experiment: " + std::string(name));
}

std::vector<ExperimentKind> all_experiments() {
  std::vector<ExperimentKind> out;
  for (const auto& [k, n] : kKindNames) out.push_back(k);
  return out;
}

// ---- config ----

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "dim = " << dim << "\n";
  out << "grid_p = " << grid_p << "\n";
  out << "grid_l = " << fmt_double(grid_l) << "\n";  // length units
  out << "kernel = " << kernel << "\n";
  out << "kernel_file = " << kernel_file << "\n";
  out << "time_count = " << time.count << "\n";
  out << "time_refinement = " << time.refinement << "\n";
  out << "time_first = " << fmt_double(time.first) << "\n";  // length units
  out << "time_spacing = " << time.spacing << "\n";
  out << "lacunary_delta = " << fmt_double(lacunary.delta) << "\n";
  out << "lacunary_m = " << lacunary.half_width << "\n";
  out << "lacunary_center = " << fmt_double(lacunary.center_scale) << "\n";  // length units
  out << "lacunary_ratio_mode = " << lacunary.ratio_mode << "\n";
  out << "lacunary_weights = " << lacunary.weights << "\n";
  out << "rho_list = " << fmt_list(rho_list) << "\n";
  out << "q = " << fmt_double(q) << "\n";
  out << "p_list = " << fmt_list(p_list) << "\n";
  out << "battery_trig_degree = " << battery.trig_degree << "\n";
  out << "battery_trig_count = " << battery.trig_count << "\n";
  out << "battery_seed = " << battery.seed << "\n";
  out << "battery_step_sharpness = " << fmt_double(battery.step_sharpness) << "\n";
  out << "battery_include_constant = " << (battery.include_constant ? 1 : 0) << "\n";
  out << "family_per_octave = " << family.per_octave << "\n";
  out << "family_center_stride = " << family.center_stride << "\n";
  out << "seed = " << seed << "\n";
  out << "out_dir = " << out_dir << "\n";
  out << "strict = " << (strict ? 1 : 0) << "\n";
  return out.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> problems;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!trim(line).empty()) problems.push_back("not a key = value line: " + trim(line));
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "dim") cfg.dim = std::stoi(val);
      else if (key == "grid_p") cfg.grid_p = std::stoi(val);
      else if (key == "grid_l") cfg.grid_l = std::stod(val);
      else if (key == "kernel") cfg.kernel = val;
      else if (key == "kernel_file") cfg.kernel_file = val;
      else if (key == "time_count") cfg.time.count = std::stoi(val);
      else if (key == "time_refinement") cfg.time.refinement = std::stoi(val);
      else if (key == "time_first") cfg.time.first = std::stod(val);
      else if (key == "time_spacing") cfg.time.spacing = val;
      else if (key == "lacunary_delta") cfg.lacunary.delta = std::stod(val);
      else if (key == "lacunary_m") cfg.lacunary.half_width = std::stoi(val);
      else if (key == "lacunary_center") cfg.lacunary.center_scale = std::stod(val);
      else if (key == "lacunary_ratio_mode") cfg.lacunary.ratio_mode = val;
      else if (key == "lacunary_weights") cfg.lacunary.weights = val;
      else if (key == "rho_list") cfg.rho_list = parse_list(val);
      else if (key == "q") cfg.q = std::stod(val);
      else if (key == "p_list") cfg.p_list = parse_list(val);
      else if (key == "battery_trig_degree") cfg.battery.trig_degree = std::stoi(val);
      else if (key == "battery_trig_count") cfg.battery.trig_count = std::stoi(val);
      else if (key == "battery_seed") cfg.battery.seed = std::stoull(val);
      else if (key == "battery_step_sharpness") cfg.battery.step_sharpness = std::stod(val);
      else if (key == "battery_include_constant") cfg.battery.include_constant = std::stoi(val) != 0;
      else if (key == "family_per_octave") cfg.family.per_octave = std::stoi(val);
      else if (key == "family_center_stride") cfg.family.center_stride = std::stoull(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "out_dir") cfg.out_dir = val;
      else if (key == "strict") cfg.strict = std::stoi(val) != 0;
      else problems.push_back("unknown key: " + key);
    } catch (const std::exception&) {
      problems.push_back("bad value for " + key + ": " + val);
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(serialize()); }

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  if (dim < 1 || dim > kMaxDim) bad.push_back("dim must be in [1, 3]");
  if (grid_p < 8) bad.push_back("grid_p must be >= 8");
  if (!(grid_l > 0.0)) bad.push_back("grid_l must be positive");
  if (kernel_file.empty() && kernel != "gaussian" && kernel != "poisson" && kernel != "bump")
    bad.push_back("kernel must be gaussian|poisson|bump (or set kernel_file)");
  if (time.count < 2) bad.push_back("time_count must be >= 2");
  if (time.refinement < 1) bad.push_back("time_refinement must be >= 1");
  if (!(time.first > 0.0)) bad.push_back("time_first must be positive");
  if (time.spacing != "dyadic") bad.push_back("time_spacing must be dyadic");
  if (!(lacunary.delta > 1.0)) bad.push_back("lacunary_delta must exceed 1");
  if (lacunary.half_width <= 2) bad.push_back("lacunary_m must exceed 2");
  if (!(lacunary.center_scale > 0.0)) bad.push_back("lacunary_center must be positive");
  if (lacunary.ratio_mode != "strong" && lacunary.ratio_mode != "plain")
    bad.push_back("lacunary_ratio_mode must be strong|plain");
  if (lacunary.weights != "ones" && lacunary.weights != "alternating" &&
      lacunary.weights != "random")
    bad.push_back("lacunary_weights must be ones|alternating|random");
  for (double r : rho_list)
    if (!(r > 2.0)) bad.push_back("rho values must exceed 2 (got " + fmt_double(r) + ")");
  if (!(q > 1.0)) bad.push_back("q must exceed 1");
  for (double p : p_list)
    if (!(p >= 1.0)) bad.push_back("p values must be >= 1 (got " + fmt_double(p) + ")");
  if (battery.trig_degree < 1) bad.push_back("battery_trig_degree must be >= 1");
  if (battery.trig_degree > grid_p / 8)
    bad.push_back("battery_trig_degree must be <= grid_p / 8");
  if (battery.trig_count < 0) bad.push_back("battery_trig_count must be >= 0");
  if (family.per_octave < 1) bad.push_back("family_per_octave must be >= 1");
  if (family.center_stride < 1) bad.push_back("family_center_stride must be >= 1");
  if (!bad.empty()) {
    std::string msg = "invalid config:";
    for (const auto& b : bad) msg += "\n  - " + b;
    throw std::invalid_argument(msg);
  }
}

TimeGrid ExperimentConfig::make_time_grid() const {
  return TimeGrid::dyadic(time.count, time.refinement, time.first);
}

LacunarySequence ExperimentConfig::make_lacunary(int half_width) const {
  WeightPattern pattern = WeightPattern::ones;
  if (lacunary.weights == "alternating") pattern = WeightPattern::alternating;
  if (lacunary.weights == "random") pattern = WeightPattern::random_signs;
  auto weights = make_weights(pattern, half_width, seed);
  if (lacunary.ratio_mode == "strong") {
    return LacunarySequence::geometric(lacunary.delta, half_width, lacunary.center_scale,
                                       std::move(weights), true);
  }
  // plain: seeded random ratios >= delta, unbounded above delta^2
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> ratio(lacunary.delta,
                                               std::pow(lacunary.delta, 2.5));
  std::vector<double> scales(static_cast<std::size_t>(2 * half_width + 2));
  scales[static_cast<std::size_t>(half_width)] = lacunary.center_scale;  // a_0
  for (int i = 1; i <= half_width + 1; ++i)
    scales[static_cast<std::size_t>(half_width + i)] =
        scales[static_cast<std::size_t>(half_width + i - 1)] * ratio(rng);
  for (int i = -1; i >= -half_width; --i)
    scales[static_cast<std::size_t>(half_width + i)] =
        scales[static_cast<std::size_t>(half_width + i + 1)] / ratio(rng);
  return LacunarySequence(lacunary.delta, half_width, std::move(scales), std::move(weights),
                          false);
}

std::unique_ptr<Kernel> ExperimentConfig::make_configured_kernel() const {
  if (!kernel_file.empty()) return load_tabulated_kernel(kernel_file, dim);
  return make_kernel(kernel, dim);
}

// ---- report ----

namespace {

std::string_view status_name(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::passed: return "passed";
    case CheckResult::Status::failed: return "failed";
    case CheckResult::Status::skipped: return "skipped";
    case CheckResult::Status::warning: return "warning";
  }
  return "unknown";
}

}  // namespace

bool RunReport::passed(bool strict) const {
  for (const auto& c : checks) {
    if (c.status == CheckResult::Status::failed) return false;
    if (strict && c.status == CheckResult::Status::warning) return false;
  }
  return true;
}

std::string RunReport::to_json(bool strict) const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  char hash_hex[20];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash));
  j["config_hash"] = hash_hex;
  j["seed"] = seed;
  j["passed"] = passed(strict);
  j["strict"] = strict;
  j["wall_seconds"] = wall_seconds;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["value"] = c.value;
    cj["threshold"] = c.threshold;
    cj["status"] = status_name(c.status);
    if (!c.note.empty()) cj["note"] = c.note;
    j["checks"].push_back(cj);
  }
  j["series"] = nlohmann::ordered_json::array();
  for (const auto& s : series) {
    nlohmann::ordered_json sj;
    sj["name"] = s.name;
    sj["columns"] = s.columns;
    sj["rows"] = s.rows;
    j["series"].push_back(sj);
  }
  j["config"] = config_text;
  return j.dump(2);
}

void emit_plot_data(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "checks.csv");
    if (!out) throw std::runtime_error("cannot write " + (dir / "checks.csv").string());
    out << "name,value,threshold,status\n";
    out.precision(17);
    for (const auto& c : report.checks)
      out << c.name << "," << c.value << "," << c.threshold << "," << status_name(c.status)
          << "\n";
  }
  for (const auto& s : report.series) {
    std::ofstream out(dir / (s.name + ".csv"));
    if (!out) throw std::runtime_error("cannot write series " + s.name);
    out.precision(17);
    for (std::size_t i = 0; i < s.columns.size(); ++i) {
      if (i) out << ",";
      out << s.columns[i];
    }
    out << "\n";
    for (const auto& row : s.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ",";
        out << row[i];
      }
      out << "\n";
    }
  }
}

// ---- experiment helpers ----

namespace {

class Checker {
 public:
  explicit Checker(RunReport& rep) : rep_(rep) {}

  void le(const std::string& name, double value, double threshold,
          bool hard = true, const std::string& note = "") {
    CheckResult c{name, value, threshold,
                  value <= threshold
                      ? CheckResult::Status::passed
                      : (hard ? CheckResult::Status::failed : CheckResult::Status::warning),
                  note};
    rep_.checks.push_back(std::move(c));
  }

  void finite(const std::string& name, double value, bool hard = true,
              const std::string& note = "") {
    CheckResult c{name, value, 0.0,
                  std::isfinite(value)
                      ? CheckResult::Status::passed
                      : (hard ? CheckResult::Status::failed : CheckResult::Status::warning),
                  note};
    rep_.checks.push_back(std::move(c));
  }

  void in_band(const std::string& name, double value, double lo, double hi,
               bool hard = true, const std::string& note = "") {
    const bool ok = std::isfinite(value) && value >= lo && value <= hi;
    CheckResult c{name, value, hi,
                  ok ? CheckResult::Status::passed
                     : (hard ? CheckResult::Status::failed : CheckResult::Status::warning),
                  note};
    rep_.checks.push_back(std::move(c));
  }

  void skip(const std::string& name, const std::string& note) {
    rep_.checks.push_back({name, 0.0, 0.0, CheckResult::Status::skipped, note});
  }

 private:
  RunReport& rep_;
};

double radial_fourier(const Kernel& k, double s) {
  if (k.has_closed_fourier()) return k.fourier_radial(s);
  return fourier_radial_numeric(k, s, k.support_radius());
}

// Semigroup fields are cached on disk when VAROPS_CACHE_DIR is set.
BuildOptions field_options() {
  BuildOptions opts;
  if (const char* env = std::getenv("VAROPS_CACHE_DIR"); env && *env)
    opts.cache_dir = std::filesystem::path(env);
  return opts;
}

std::vector<std::size_t> sample_indices(const Grid& grid, std::size_t count) {
  count = std::min(count, grid.size());
  std::vector<std::size_t> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = (i * grid.size()) / count;
  return xs;
}

// ---- oracle suite ----

double oracle_variation_exhaustive(std::span<const double> values, double rho) {
  const std::size_t n = values.size();
  if (n > 20) throw std::logic_error("exhaustive variation oracle limited to 20 scales");
  double best = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int prev = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mask & (1u << j))) continue;
      if (prev >= 0)
        sum += std::pow(std::abs(values[static_cast<std::size_t>(prev)] - values[j]), rho);
      prev = static_cast<int>(j);
    }
    best = std::max(best, sum);
  }
  return std::pow(best, 1.0 / rho);
}

// All admissible windows evaluated from an independently recomputed prefix
// array; shares the summation substrate with the scan on purpose (the scan's
// window logic is what is being verified, bitwise).
double oracle_windows_prefix(const LacunaryField& lf, std::size_t x, int lo, int hi) {
  std::vector<double> prefix(static_cast<std::size_t>(hi - lo + 2));
  prefix[0] = 0.0;
  for (int i = lo; i <= hi; ++i)
    prefix[static_cast<std::size_t>(i - lo + 1)] =
        prefix[static_cast<std::size_t>(i - lo)] +
        lf.seq.weight(i) * (lf.slice(i + 1)[x] - lf.slice(i)[x]);
  double best = 0.0;
  for (int n1 = lo; n1 < hi; ++n1)
    for (int n2 = n1 + 1; n2 <= hi; ++n2)
      best = std::max(best, std::abs(prefix[static_cast<std::size_t>(n2 - lo + 1)] -
                                     prefix[static_cast<std::size_t>(n1 - lo)]));
  return best;
}

double oracle_windows_terms(const LacunaryField& lf, std::size_t x, int lo, int hi) {
  double best = 0.0;
  for (int n1 = lo; n1 < hi; ++n1)
    for (int n2 = n1 + 1; n2 <= hi; ++n2) {
      double sum = 0.0;
      for (int i = n1; i <= n2; ++i)
        sum += lf.seq.weight(i) * (lf.slice(i + 1)[x] - lf.slice(i)[x]);
      best = std::max(best, std::abs(sum));
    }
  return best;
}

RunReport exp_oracle_suite(const ExperimentConfig& cfg) {
  RunReport rep;
  Checker check(rep);
  const Grid grid(cfg.dim, std::min(cfg.grid_p, 64), cfg.grid_l);
  const auto kernel = cfg.make_configured_kernel();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // interval_range vs all-pairs sup (bitwise)
  {
    const auto f = random_trig_polynomial(grid, std::max(1, grid.points_per_axis() / 8),
                                          cfg.seed + 7);
    const auto field = build_field(f, *kernel, TimeGrid::dyadic(4, 4, 1.0));
    std::size_t mismatches = 0;
    for (std::size_t x : sample_indices(grid, 16)) {
      for (int i = 0; i < field.times.interval_count(); ++i) {
        const auto [first, last] = field.times.interval_span(i);
        double brute = 0.0;
        for (int a = first; a <= last; ++a)
          for (int b = a + 1; b <= last; ++b)
            brute = std::max(brute, std::abs(field.slice_at(a, x) - field.slice_at(b, x)));
        if (brute != interval_range(field, x, i)) ++mismatches;
      }
    }
    check.le("interval_range_allpairs_mismatches", static_cast<double>(mismatches), 0.0);
  }

  // variation DP vs exhaustive subsequence enumeration, 100+ random instances
  {
    const Grid tiny(cfg.dim, 8, cfg.grid_l);
    const TimeGrid times = TimeGrid::dyadic(4, 4, 1.0);  // 10 flattened scales
    std::size_t mismatches = 0;
    std::size_t instances = 0;
    const double rho = cfg.rho_list.empty() ? 3.0 : cfg.rho_list[std::min<std::size_t>(
                                                        1, cfg.rho_list.size() - 1)];
    for (int rep_i = 0; rep_i < 13 && instances < 104; ++rep_i) {
      SemigroupField field{SampledFunction(tiny), times, {}};
      for (std::size_t s = 0; s < times.flattened().size(); ++s) {
        SampledFunction slice(tiny);
        for (std::size_t i = 0; i < slice.size(); ++i) slice[i] = gauss(rng);
        field.slices.push_back(std::move(slice));
      }
      for (std::size_t x = 0; x < tiny.size(); ++x) {
        std::vector<double> values(field.slices.size());
        for (std::size_t j = 0; j < values.size(); ++j)
          values[j] = field.slice_at(static_cast<int>(j), x);
        const double oracle = oracle_variation_exhaustive(values, rho);
        const auto dp = variation(field, x, rho);
        if (std::abs(dp.value - oracle) > 1e-12 * std::max(1.0, oracle)) ++mismatches;
        ++instances;
      }
    }
    check.le("variation_dp_vs_exhaustive_mismatches", static_cast<double>(mismatches), 0.0,
             true, std::to_string(instances) + " instances");
  }

  // prefix-scan maximal vs exhaustive window enumeration
  {
    const Grid tiny(cfg.dim, 8, cfg.grid_l);
    std::size_t scan_mismatches = 0;
    std::size_t term_mismatches = 0;
    for (int m : {3, 4, 6, 8}) {
      LacunaryField lf{LacunarySequence::geometric(
                           2.0, m, 1.0, make_weights(WeightPattern::random_signs, m, cfg.seed + m)),
                       tiny,
                       {}};
      for (int i = -m; i <= m + 1; ++i) {
        SampledFunction slice(tiny);
        for (std::size_t j = 0; j < slice.size(); ++j) slice[j] = gauss(rng);
        lf.slices.push_back(std::move(slice));
      }
      for (std::size_t x = 0; x < tiny.size(); ++x) {
        const double scan = diff_transform_maximal(lf, m, x);
        if (scan != oracle_windows_prefix(lf, x, -m + 2, m - 2)) ++scan_mismatches;
        if (std::abs(scan - oracle_windows_terms(lf, x, -m + 2, m - 2)) > 1e-12)
          ++term_mismatches;
        const double full = diff_transform_maximal_full(lf, x);
        if (full != oracle_windows_prefix(lf, x, -m, m)) ++scan_mismatches;
      }
    }
    check.le("window_scan_vs_enumeration_mismatches", static_cast<double>(scan_mismatches),
             0.0);
    check.le("window_scan_vs_term_sum_mismatches", static_cast<double>(term_mismatches), 0.0,
             true, "tolerance 1e-12");
  }

  // partial sums vs term-by-term direct-backend convolutions
  {
    const auto f = random_trig_polynomial(grid, 4, cfg.seed + 11);
    const auto seq = LacunarySequence::geometric(
        2.0, 4, 1.0, make_weights(WeightPattern::random_signs, 4, cfg.seed + 13));
    const auto lf = build_lacunary_field(f, *kernel, seq, ConvBackend::spectral);
    double sup = 0.0;
    const WindowIndex w{-2, 3};
    for (std::size_t x : sample_indices(grid, 8)) {
      double oracle = 0.0;
      for (int i = w.n1; i <= w.n2; ++i) {
        const auto hi = convolve(f, *kernel, seq.scale(i + 1), ConvBackend::direct);
        const auto lo = convolve(f, *kernel, seq.scale(i), ConvBackend::direct);
        oracle += seq.weight(i) * (hi[x] - lo[x]);
      }
      sup = std::max(sup, std::abs(oracle - diff_transform_partial(lf, w, x)));
    }
    check.le("partial_sum_vs_direct_backend_sup", sup, 1e-8);
  }

  return rep;
}

// ---- kernel bounds ----

RunReport exp_kernel_bounds(const ExperimentConfig& cfg) {
  RunReport rep;
  Checker check(rep);

  std::vector<std::string> names{"gaussian", "poisson"};
  if (cfg.kernel != "gaussian" && cfg.kernel != "poisson") names.push_back(cfg.kernel);

  for (const auto& name : names) {
    const auto k = cfg.kernel_file.empty() || name != cfg.kernel
                       ? make_kernel(name, cfg.dim)
                       : cfg.make_configured_kernel();
    const std::vector<int> ms{4, 8, 16};
    const auto sweep = check_kernel_bounds(*k, 2.0, WeightPattern::ones, ms, 16, cfg.seed);
    check.finite("size_constant_" + name, sweep.size_constant.back());
    check.finite("grad_constant_" + name, sweep.grad_constant.back());
    check.le("size_constant_drift_" + name, sweep.size_drift, 0.10);
    check.le("grad_constant_drift_" + name, sweep.grad_drift, 0.10);

    const auto alt =
        check_kernel_bounds(*k, 2.0, WeightPattern::alternating, ms, 16, cfg.seed);
    check.le("size_constant_drift_alternating_" + name, alt.size_drift, 0.25, false);

    Series s{"kernel_bounds_" + name, {"M", "size_constant", "grad_constant",
                                       "alt_size_constant"}, {}};
    for (std::size_t i = 0; i < ms.size(); ++i)
      s.rows.push_back({static_cast<double>(ms[i]), sweep.size_constant[i],
                        sweep.grad_constant[i], alt.size_constant[i]});
    rep.series.push_back(std::move(s));

    // upper-tail window bound (Cotlar ingredient), m-stability
    const auto seq = LacunarySequence::geometric(2.0, 12, 1.0,
                                                 make_weights(WeightPattern::ones, 12));
    const std::vector<int> starts{-6, -3, 0, 3, 6};
    const auto tail = check_tail_bound(*k, seq, starts, 16);
    check.finite("tail_bound_" + name, *std::max_element(tail.constant.begin(),
                                                         tail.constant.end()));
    check.le("tail_bound_drift_" + name, tail.drift, 1.0, false);
    Series ts{"tail_bound_" + name, {"m", "constant"}, {}};
    for (std::size_t i = 0; i < starts.size(); ++i)
      ts.rows.push_back({static_cast<double>(starts[i]), tail.constant[i]});
    rep.series.push_back(std::move(ts));

    // d/dt estimate constants on a reference ball
    const bool hard = (name == "gaussian" && cfg.dim == 1);
    const auto deriv = check_derivative_bounds(*k, Ball{Point{}, 1.0}, 24);
    const std::pair<std::string, BoundEstimate> ests[] = {
        {"deriv_pointwise", deriv.pointwise},
        {"deriv_outer", deriv.outer},
        {"deriv_difference_in", deriv.difference_in},
        {"deriv_difference_out", deriv.difference_out},
    };
    Series ds{"derivative_bounds_" + name, {"estimate", "coarse", "fine"}, {}};
    int est_idx = 0;
    for (const auto& [ename, est] : ests) {
      check.finite(ename + "_constant_" + name, est.fine, hard);
      check.le(ename + "_drift_" + name, est.drift(), 0.20, hard);
      ds.rows.push_back({static_cast<double>(est_idx++), est.coarse, est.fine});
    }
    rep.series.push_back(std::move(ds));
  }
  return rep;
}

// ---- BMO lemma ----

RunReport exp_bmo_lemma(const ExperimentConfig& cfg) {
  RunReport rep;
  Checker check(rep);
  const Grid grid(cfg.dim, cfg.grid_p, cfg.grid_l);
  const auto fam = BallFamily::dense(grid, cfg.family.per_octave, cfg.family.center_stride);
  Series s{"bmo_lemma", {"function", "bmo", "blo", "dilate_mean_c", "l2_osc_c",
                         "dilate_dev_c"}, {}};
  int idx = 0;
  for (const auto& tf : make_battery(grid, cfg.battery)) {
    const auto lemma = check_bmo_lemma(tf.f, fam, 3);
    if (lemma.skipped) {
      check.skip("bmo_lemma_" + tf.name, "constant input, statements vacuous");
      ++idx;
      continue;
    }
    check.le("jensen_violations_" + tf.name, static_cast<double>(lemma.jensen_violations),
             0.0);
    check.finite("dilate_mean_constant_" + tf.name, lemma.dilate_mean_constant);
    check.finite("l2_oscillation_constant_" + tf.name, lemma.l2_oscillation_constant);
    check.finite("dilate_deviation_constant_" + tf.name, lemma.dilate_deviation_constant);

    const double bmo = lemma.bmo;
    const double blo = blo_norm(tf.f, fam).value;
    check.le("bmo_le_two_blo_" + tf.name, bmo, 2.0 * blo * (1.0 + 1e-12));

    // constant shifts leave both norms unchanged
    SampledFunction shifted(grid);
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = tf.f[i] + 0.7330956;
    const double bmo_shift = bmo_norm(shifted, fam).value;
    const double blo_shift = blo_norm(shifted, fam).value;
    check.le("bmo_shift_invariance_" + tf.name, std::abs(bmo_shift - bmo),
             1e-12 * std::max(1.0, bmo));
    check.le("blo_shift_invariance_" + tf.name, std::abs(blo_shift - blo),
             1e-12 * std::max(1.0, blo));

    s.rows.push_back({static_cast<double>(idx++), bmo, blo, lemma.dilate_mean_constant,
                      lemma.l2_oscillation_constant, lemma.dilate_deviation_constant});
  }
  rep.series.push_back(std::move(s));
  return rep;
}

// ---- L2 multiplier bound ----

RunReport exp_l2_bound(const ExperimentConfig& cfg) {
  RunReport rep;
  Checker check(rep);
  const auto kernel = cfg.make_configured_kernel();

  // total-variation quadrature of int_0^inf |d/dt F(phi)(t xi)| dt on a
  // xi-grid; refinement inserts log-midpoints so the TV sum only grows
  const auto xi_grid = [] {
    std::vector<double> xs;
    for (int i = 0; i <= 16; ++i) xs.push_back(0.25 * std::pow(2.0, i * 0.5));
    return xs;
  }();
  auto tv_for = [&](double xi, int levels) {
    const double s_lo = 1e-5;
    const double s_hi = 2e3;
    const int base = 512;
    const int count = base << levels;
    double tv = 0.0;
    double prev = radial_fourier(*kernel, (s_lo / xi) * xi);
    tv += std::abs(prev - radial_fourier(*kernel, 0.0));
    for (int j = 1; j <= count; ++j) {
      const double s = s_lo * std::pow(s_hi / s_lo, static_cast<double>(j) / count);
      const double g = radial_fourier(*kernel, (s / xi) * xi);
      tv += std::abs(g - prev);
      prev = g;
    }
    tv += std::abs(prev);
    return tv;
  };

  double bound_coarse = 0.0;
  double bound_fine = 0.0;
  double fine_min = std::numeric_limits<double>::infinity();
  Series ms{"multiplier_bound", {"xi", "tv_coarse", "tv_fine"}, {}};
  for (double xi : xi_grid) {
    const double c = tv_for(xi, 0);
    const double f = tv_for(xi, 1);
    bound_coarse = std::max(bound_coarse, c);
    bound_fine = std::max(bound_fine, f);
    fine_min = std::min(fine_min, f);
    ms.rows.push_back({xi, c, f});
  }
  rep.series.push_back(std::move(ms));

  check.finite("multiplier_bound", bound_fine);
  check.le("multiplier_bound_drift", bound_coarse > 0.0 ? bound_fine / bound_coarse - 1.0 : 0.0,
           0.20);
  check.le("multiplier_uniformity_spread",
           fine_min > 0.0 ? bound_fine / fine_min - 1.0 : 0.0, 0.05, false,
           "radial kernels give xi-independent integrals");

  // ||S_{a,v;N} f||_2 <= (bound * 1.05) ||v||_inf ||f||_2 on random trig inputs
  const Grid grid(cfg.dim, cfg.grid_p, cfg.grid_l);
  const int m_top = std::max(8, cfg.lacunary.half_width);
  const auto seq = cfg.make_lacunary(m_top);
  const double cap = 1.05 * bound_fine * seq.weight_sup();
  double worst = 0.0;
  std::map<int, double> per_window_max;
  for (int i = 0; i < 20; ++i) {
    const auto f = random_trig_polynomial(grid, cfg.battery.trig_degree,
                                          cfg.seed + 100 + static_cast<std::uint64_t>(i));
    const double f2 = lp_norm(f, 2.0);
    if (f2 == 0.0) continue;
    const auto lf = build_lacunary_field(f, *kernel, seq);
    for (int half : {2, 4, 8}) {
      const auto sf = diff_transform_partial_function(lf, WindowIndex{-half, half});
      const double ratio = lp_norm(sf, 2.0) / f2;
      worst = std::max(worst, ratio);
      per_window_max[half] = std::max(per_window_max[half], ratio);
    }
  }
  check.le("l2_operator_ratio_max", worst, cap, true,
           "cap = 1.05 * multiplier bound * ||v||_inf");
  Series ws{"l2_ratio_vs_window", {"window_halfwidth", "max_ratio"}, {}};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& [half, ratio] : per_window_max) {
    ws.rows.push_back({static_cast<double>(half), ratio});
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  rep.series.push_back(std::move(ws));
  check.le("l2_ratio_window_drift", lo > 0.0 ? hi / lo - 1.0 : 0.0, 0.25, false,
           "ratio stability as the window widens");
  return rep;
}

// ---- Lp sweep ----

RunReport exp_lp_sweep(const ExperimentConfig& cfg) {
  RunReport rep;
  Checker check(rep);
  const Grid grid(cfg.dim, cfg.grid_p, cfg.grid_l);
  const auto kernel = cfg.make_configured_kernel();
  const auto times = cfg.make_time_grid();
  const int m = std::max(8, cfg.lacunary.half_width);
  const auto seq = cfg.make_lacunary(m);
  const double rho = 3.0;

  Series s{"lp_ratios", {"function", "p", "osc_ratio", "var_ratio", "maxdiff_ratio"}, {}};
  int idx = 0;
  for (const auto& tf : make_battery(grid, cfg.battery)) {
    const auto field = build_field(tf.f, *kernel, times, field_options());
    const auto osc = oscillation_field(field);
    const auto var = variation_field(field, rho);
    const auto lf = build_lacunary_field(tf.f, *kernel, seq);
    const auto mx = diff_transform_maximal_field(lf, std::min(8, m));
    for (double p : cfg.p_list) {
      const double fp = lp_norm(tf.f, p);
      if (fp == 0.0) {
        check.skip("lp_ratio_" + tf.name, "zero input norm");
        continue;
      }
      const double ro = lp_norm(osc.values, p) / fp;
      const double rv = lp_norm(var.values, p) / fp;
      const double rm = lp_norm(mx.values, p) / fp;
      check.finite("osc_lp_ratio_" + tf.name + "_p" + fmt_double(p), ro);
      check.finite("var_lp_ratio_" + tf.name + "_p" + fmt_double(p), rv);
      check.finite("maxdiff_lp_ratio_" + tf.name + "_p" + fmt_double(p), rm);
      s.rows.push_back({static_cast<double>(idx), p, ro, rv, rm});
    }
    ++idx;
  }
  rep.series.push_back(std::move(s));
  return rep;
}

// ---- Cotlar ----

RunReport exp_cotlar(const ExperimentConfig& cfg) {
  RunReport rep;
  Checker check(rep);
  const Grid grid(cfg.dim, cfg.grid_p, cfg.grid_l);
  const auto kernel = cfg.make_configured_kernel();
  const auto seq = cfg.make_lacunary(std::max(8, cfg.lacunary.half_width));
  const auto ladder = default_radius_ladder(grid, cfg.family.per_octave);
  const auto xs = sample_indices(grid, 64);

  for (const auto& tf : make_battery(grid, cfg.battery)) {
    const auto rep4 = cotlar_check(tf.f, *kernel, seq, 4, cfg.q, xs, ladder);
    const auto rep8 = cotlar_check(tf.f, *kernel, seq, 8, cfg.q, xs, ladder);
    if (rep4.zero_denominator_failure || rep8.zero_denominator_failure) {
      check.le("cotlar_zero_denominator_" + tf.name, 1.0, 0.0, true,
               "nonzero numerator with zero denominator");
      continue;
    }
    if (rep8.evaluated == 0) {
      check.skip("cotlar_" + tf.name, "identically zero input");
      continue;
    }
    check.finite("cotlar_max_ratio_M4_" + tf.name, rep4.max_ratio);
    check.finite("cotlar_max_ratio_M8_" + tf.name, rep8.max_ratio);
    if (rep4.max_ratio > 0.0)
      check.in_band("cotlar_stability_" + tf.name, rep8.max_ratio / rep4.max_ratio, 0.5, 2.0);
    Series s{"cotlar_ratios_" + tf.name, {"x_index", "ratio_M4", "ratio_M8"}, {}};
    for (std::size_t i = 0; i < xs.size(); ++i)
      s.rows.push_back({static_cast<double>(xs[i]), rep4.ratios[i], rep8.ratios[i]});
    rep.series.push_back(std::move(s));
  }
  return rep;
}

// ---- BMO -> BLO ratios ----

enum class BmoBloOp { osc, var, maxdiff };

RunReport exp_bmo_blo(const ExperimentConfig& cfg, BmoBloOp which) {
  RunReport rep;
  Checker check(rep);
  const auto kernel = cfg.make_configured_kernel();
  const auto times = cfg.make_time_grid();
  const double rho = 3.0;
  const int m = std::max(8, cfg.lacunary.half_width);
  const auto seq = cfg.make_lacunary(m);

  struct Entry {
    std::string name;
    double ratio = 0.0;
    bool skipped = false;
  };
  std::map<int, std::vector<Entry>> by_p;

  for (int p : {cfg.grid_p, 2 * cfg.grid_p}) {
    const Grid grid(cfg.dim, p, cfg.grid_l);
    const auto fam = BallFamily::dense(grid, cfg.family.per_octave, cfg.family.center_stride);
    bool emitted_slice = false;
    for (const auto& tf : make_battery(grid, cfg.battery)) {
      OperatorField op{SampledFunction(grid), "", ""};
      switch (which) {
        case BmoBloOp::osc: {
          const auto field = build_field(tf.f, *kernel, times, field_options());
          op = oscillation_field(field);
          break;
        }
        case BmoBloOp::var: {
          const auto field = build_field(tf.f, *kernel, times, field_options());
          op = variation_field(field, rho);
          break;
        }
        case BmoBloOp::maxdiff: {
          const auto lf = build_lacunary_field(tf.f, *kernel, seq);
          op = diff_transform_maximal_field(lf, std::min(8, m));
          break;
        }
      }
      const auto rr = bmo_blo_ratio(op, tf.f, fam);
      by_p[p].push_back({tf.name, rr.ratio, rr.skipped});
      if (rr.skipped) {
        check.skip("bmo_blo_" + tf.name + "_P" + std::to_string(p), "constant input");
      } else {
        check.finite("bmo_blo_ratio_" + tf.name + "_P" + std::to_string(p), rr.ratio);
      }
      if (!emitted_slice && !rr.skipped && p == cfg.grid_p) {
        Series s{"slice_" + op.op_name + "_" + tf.name, {"x", "value"}, {}};
        const std::size_t stride = std::max<std::size_t>(1, grid.size() / 512);
        for (std::size_t i = 0; i < grid.size(); i += stride)
          s.rows.push_back({grid.coord(i)[0], op.values[i]});
        rep.series.push_back(std::move(s));
        emitted_slice = true;
      }
    }
  }

  Series s{"ratio_vs_P", {"function", "P", "ratio"}, {}};
  const auto& base = by_p[cfg.grid_p];
  const auto& fine = by_p[2 * cfg.grid_p];
  for (std::size_t i = 0; i < base.size(); ++i) {
    s.rows.push_back({static_cast<double>(i), static_cast<double>(cfg.grid_p),
                      base[i].ratio});
    s.rows.push_back({static_cast<double>(i), static_cast<double>(2 * cfg.grid_p),
                      fine[i].ratio});
    if (base[i].skipped || fine[i].skipped) continue;
    if (base[i].ratio > 0.0)
      check.in_band("refinement_stability_" + base[i].name, fine[i].ratio / base[i].ratio,
                    0.5, 2.0);
  }
  rep.series.push_back(std::move(s));
  return rep;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, ExperimentKind kind) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  switch (kind) {
    case ExperimentKind::kernel_bounds: rep = exp_kernel_bounds(cfg); break;
    case ExperimentKind::bmo_lemma: rep = exp_bmo_lemma(cfg); break;
    case ExperimentKind::l2_bound: rep = exp_l2_bound(cfg); break;
    case ExperimentKind::lp_sweep: rep = exp_lp_sweep(cfg); break;
    case ExperimentKind::cotlar: rep = exp_cotlar(cfg); break;
    case ExperimentKind::bmo_blo_osc: rep = exp_bmo_blo(cfg, BmoBloOp::osc); break;
    case ExperimentKind::bmo_blo_var: rep = exp_bmo_blo(cfg, BmoBloOp::var); break;
    case ExperimentKind::bmo_blo_maxdiff: rep = exp_bmo_blo(cfg, BmoBloOp::maxdiff); break;
    case ExperimentKind::oracle_suite: rep = exp_oracle_suite(cfg); break;
  }
  rep.experiment = std::string(experiment_name(kind));
  rep.config_text = cfg.serialize();
  rep.config_hash = cfg.hash();
  rep.seed = cfg.seed;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace varops
