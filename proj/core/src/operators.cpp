#include "varops/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "varops/parallel.hpp"

namespace varops {

LacunarySequence::LacunarySequence(double delta, int half_width, std::vector<double> scales,
                                   std::vector<double> weights, bool strong_ratio)
    : delta_(delta),
      m_(half_width),
      strong_(strong_ratio),
      scales_(std::move(scales)),
      weights_(std::move(weights)) {
  if (!(delta_ > 1.0)) throw std::invalid_argument("lacunarity delta must exceed 1");
  if (m_ <= 2) throw std::invalid_argument("half width M must exceed 2");
  const std::size_t ns = static_cast<std::size_t>(2 * m_ + 2);
  const std::size_t nw = static_cast<std::size_t>(2 * m_ + 1);
  if (scales_.size() != ns)
    throw std::invalid_argument("expected scales a_{-M}..a_{M+1}");
  if (weights_.size() != nw)
    throw std::invalid_argument("expected weights v_{-M}..v_{M}");
  constexpr double slack = 1.0 + 1e-12;
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    if (!(scales_[i] > 0.0) || !std::isfinite(scales_[i]))
      throw std::invalid_argument("scales must be positive and finite");
    if (i > 0) {
      const double ratio = scales_[i] / scales_[i - 1];
      if (ratio * slack < delta_)
        throw std::invalid_argument("scale ratio below delta: sequence not delta-lacunary");
      if (strong_ && ratio > delta_ * delta_ * slack)
        throw std::invalid_argument("scale ratio above delta^2: strong condition violated");
    }
  }
  weight_sup_ = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w)) throw std::invalid_argument("weights must be finite");
    weight_sup_ = std::max(weight_sup_, std::abs(w));
  }
}

LacunarySequence LacunarySequence::geometric(double delta, int half_width,
                                             double center_scale,
                                             std::vector<double> weights,
                                             bool strong_ratio) {
  std::vector<double> scales(static_cast<std::size_t>(2 * half_width + 2));
  for (int i = -half_width; i <= half_width + 1; ++i)
    scales[static_cast<std::size_t>(i + half_width)] =
        center_scale * std::pow(delta, static_cast<double>(i));
  return LacunarySequence(delta, half_width, std::move(scales), std::move(weights),
                          strong_ratio);
}

std::vector<double> make_weights(WeightPattern pattern, int half_width, std::uint64_t seed) {
  std::vector<double> w(static_cast<std::size_t>(2 * half_width + 1), 1.0);
  switch (pattern) {
    case WeightPattern::ones:
      break;
    case WeightPattern::alternating:
      for (int i = -half_width; i <= half_width; ++i)
        w[static_cast<std::size_t>(i + half_width)] = (i % 2 == 0) ? 1.0 : -1.0;
      break;
    case WeightPattern::random_signs: {
      std::mt19937_64 rng(seed);
      for (auto& v : w) v = (rng() & 1u) ? 1.0 : -1.0;
      break;
    }
  }
  return w;
}

// ---- oscillation ----

double oscillation(const SemigroupField& field, std::size_t x) {
  const int intervals = field.times.interval_count();
  if (intervals < 1)
    throw std::invalid_argument("oscillation needs at least two base scales");
  double sq = 0.0;
  for (int i = 0; i < intervals; ++i) {
    const double r = interval_range(field, x, i);
    sq += r * r;
  }
  return std::sqrt(sq);
}

OperatorField oscillation_field(const SemigroupField& field) {
  SampledFunction out(field.base.grid());
  parallel_for(out.size(), [&](std::size_t x) { out[x] = oscillation(field, x); });
  std::ostringstream params;
  params << "K=" << field.times.scales().size() << ",R=" << field.times.refinement();
  return {std::move(out), "oscillation", params.str()};
}

// ---- variation ----

namespace {

double variation_dp(std::span<const double> values, double rho, std::vector<double>& best,
                    std::vector<int>* pred) {
  const std::size_t n = values.size();
  best.assign(n, 0.0);
  if (pred) pred->assign(n, -1);
  double top = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      const double w = std::pow(std::abs(values[j] - values[k]), rho);
      const double cand = best[j] + w;
      if (cand > best[k]) {
        best[k] = cand;
        if (pred) (*pred)[k] = static_cast<int>(j);
      }
    }
    top = std::max(top, best[k]);
  }
  return top;
}

void require_rho(double rho) {
  if (!(rho > 2.0)) throw std::invalid_argument("variation exponent must exceed 2");
}

}  // namespace

VariationResult variation(const SemigroupField& field, std::size_t x, double rho) {
  require_rho(rho);
  const std::size_t n = field.slices.size();
  std::vector<double> values(n);
  for (std::size_t j = 0; j < n; ++j) values[j] = field.slice_at(static_cast<int>(j), x);

  std::vector<double> best;
  std::vector<int> pred;
  const double top = variation_dp(values, rho, best, &pred);

  VariationResult res;
  res.value = std::pow(top, 1.0 / rho);
  int arg = -1;
  for (std::size_t k = 0; k < n; ++k)
    if (arg < 0 || best[k] > best[static_cast<std::size_t>(arg)]) arg = static_cast<int>(k);
  if (top > 0.0 && arg >= 0) {
    for (int k = arg; k >= 0; k = pred[static_cast<std::size_t>(k)])
      res.subsequence.push_back(k);
    std::reverse(res.subsequence.begin(), res.subsequence.end());
  }
  return res;
}

OperatorField variation_field(const SemigroupField& field, double rho) {
  require_rho(rho);
  SampledFunction out(field.base.grid());
  const std::size_t n = field.slices.size();
  parallel_for(out.size(), [&](std::size_t x) {
    thread_local std::vector<double> values;
    thread_local std::vector<double> best;
    values.resize(n);
    for (std::size_t j = 0; j < n; ++j) values[j] = field.slice_at(static_cast<int>(j), x);
    out[x] = std::pow(variation_dp(values, rho, best, nullptr), 1.0 / rho);
  });
  std::ostringstream params;
  params << "rho=" << rho << ",pool=" << n;
  return {std::move(out), "variation", params.str()};
}

// ---- differential transform ----

LacunaryField build_lacunary_field(const SampledFunction& f, const Kernel& k,
                                   const LacunarySequence& seq, ConvBackend backend,
                                   bool parallel) {
  LacunaryField lf{seq, f.grid(), {}};
  const auto& scales = seq.scales();
  lf.slices.assign(scales.size(), SampledFunction(f.grid()));
  auto run = [&](std::size_t j) { lf.slices[j] = convolve(f, k, scales[j], backend); };
  if (parallel) {
    parallel_for(scales.size(), run);
  } else {
    for (std::size_t j = 0; j < scales.size(); ++j) run(j);
  }
  return lf;
}

namespace {

void require_window(const LacunarySequence& seq, WindowIndex w) {
  if (w.n1 >= w.n2) throw std::invalid_argument("window requires N1 < N2");
  if (w.n1 < -seq.half_width() || w.n2 > seq.half_width())
    throw std::out_of_range("window outside the materialized scale range");
}

}  // namespace

double diff_transform_partial(const LacunaryField& lf, WindowIndex w, std::size_t x) {
  require_window(lf.seq, w);
  double acc = 0.0;
  for (int i = w.n1; i <= w.n2; ++i)
    acc += lf.seq.weight(i) * (lf.slice(i + 1)[x] - lf.slice(i)[x]);
  return acc;
}

SampledFunction diff_transform_partial_function(const LacunaryField& lf, WindowIndex w) {
  require_window(lf.seq, w);
  SampledFunction out(lf.grid);
  parallel_for(out.size(), [&](std::size_t x) {
    double acc = 0.0;
    for (int i = w.n1; i <= w.n2; ++i)
      acc += lf.seq.weight(i) * (lf.slice(i + 1)[x] - lf.slice(i)[x]);
    out[x] = acc;
  });
  return out;
}

namespace {

// sup over windows N1 in [lo, N2), N2 in (lo, hi] of |P(N2) - P(N1 - 1)| with
// P the prefix sums of d_i = v_i (Phi_{a_{i+1}} f - Phi_{a_i} f). Admissible
// prefix indices lag the scan by two, so windows keep at least two terms.
double window_scan(const LacunaryField& lf, std::size_t x, int lo, int hi) {
  const int count = hi - lo + 2;  // prefix indices lo-1 .. hi
  thread_local std::vector<double> prefix;
  prefix.resize(static_cast<std::size_t>(count));
  prefix[0] = 0.0;
  for (int i = lo; i <= hi; ++i)
    prefix[static_cast<std::size_t>(i - lo + 1)] =
        prefix[static_cast<std::size_t>(i - lo)] +
        lf.seq.weight(i) * (lf.slice(i + 1)[x] - lf.slice(i)[x]);

  double best = 0.0;
  double pmin = std::numeric_limits<double>::infinity();
  double pmax = -pmin;
  for (int k = lo + 1; k <= hi; ++k) {
    const double lagged = prefix[static_cast<std::size_t>(k - 1 - lo)];  // P(k-2)
    pmin = std::min(pmin, lagged);
    pmax = std::max(pmax, lagged);
    const double pk = prefix[static_cast<std::size_t>(k - lo + 1)];
    best = std::max(best, std::max(pk - pmin, pmax - pk));
  }
  return best;
}

}  // namespace

double diff_transform_maximal(const LacunaryField& lf, int truncation, std::size_t x) {
  if (truncation <= 2) throw std::invalid_argument("truncation M must exceed 2");
  if (truncation > lf.seq.half_width())
    throw std::out_of_range("truncation exceeds materialized half width");
  return window_scan(lf, x, -truncation + 2, truncation - 2);
}

OperatorField diff_transform_maximal_field(const LacunaryField& lf, int truncation) {
  if (truncation <= 2) throw std::invalid_argument("truncation M must exceed 2");
  if (truncation > lf.seq.half_width())
    throw std::out_of_range("truncation exceeds materialized half width");
  SampledFunction out(lf.grid);
  parallel_for(out.size(), [&](std::size_t x) {
    out[x] = window_scan(lf, x, -truncation + 2, truncation - 2);
  });
  std::ostringstream params;
  params << "M=" << truncation << ",delta=" << lf.seq.delta();
  return {std::move(out), "maximal_diff_transform", params.str()};
}

double diff_transform_maximal_full(const LacunaryField& lf, std::size_t x) {
  const int m = lf.seq.half_width();
  return window_scan(lf, x, -m, m);
}

// ---- window kernel ----

double window_kernel(const Kernel& k, const LacunarySequence& seq, WindowIndex w,
                     const Point& y) {
  require_window(seq, w);
  double acc = 0.0;
  for (int i = w.n1; i <= w.n2; ++i)
    acc += seq.weight(i) * (dilate(k, seq.scale(i + 1), y) - dilate(k, seq.scale(i), y));
  return acc;
}

Point window_kernel_gradient(const Kernel& k, const LacunarySequence& seq, WindowIndex w,
                             const Point& y) {
  require_window(seq, w);
  Point acc{};
  for (int i = w.n1; i <= w.n2; ++i) {
    const Point hi = dilate_gradient(k, seq.scale(i + 1), y);
    const Point lo = dilate_gradient(k, seq.scale(i), y);
    acc = acc + scaled(hi - lo, seq.weight(i));
  }
  return acc;
}

namespace {

std::vector<Point> bound_directions(int dim) {
  std::vector<Point> dirs;
  for (int a = 0; a < dim; ++a) {
    Point e{};
    e[a] = 1.0;
    dirs.push_back(e);
    if (dim > 1) {
      Point m{};
      m[a] = -1.0;
      dirs.push_back(m);
    }
  }
  if (dim > 1) {
    Point d{};
    for (int a = 0; a < dim; ++a) d[a] = 1.0 / std::sqrt(static_cast<double>(dim));
    dirs.push_back(d);
  }
  return dirs;
}

std::vector<double> log_ladder(double lo, double hi, int per_octave) {
  const int steps = std::max(1, static_cast<int>(std::ceil(std::log2(hi / lo) * per_octave)));
  std::vector<double> out(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i)
    out[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / steps);
  return out;
}

double spread(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi == 0.0) return 0.0;
  return *lo > 0.0 ? *hi / *lo - 1.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

KernelBoundSweep check_kernel_bounds(const Kernel& k, double delta, WeightPattern pattern,
                                     const std::vector<int>& truncations,
                                     int samples_per_octave, std::uint64_t seed) {
  KernelBoundSweep sweep;
  sweep.truncations = truncations;
  const int n = k.dim();
  const auto dirs = bound_directions(n);
  for (int m : truncations) {
    const auto seq =
        LacunarySequence::geometric(delta, m, 1.0, make_weights(pattern, m, seed));
    const WindowIndex full{-m, m};
    const double y_lo = seq.scale(-m) / 8.0;
    const double y_hi = seq.scale(m + 1) * 8.0;
    double size_c = 0.0;
    double grad_c = 0.0;
    for (double r : log_ladder(y_lo, y_hi, samples_per_octave))
      for (const auto& d : dirs) {
        const Point y = scaled(d, r);
        size_c = std::max(size_c,
                          std::pow(r, n) * std::abs(window_kernel(k, seq, full, y)));
        grad_c = std::max(grad_c, std::pow(r, n + 1) *
                                      norm(window_kernel_gradient(k, seq, full, y)));
      }
    sweep.size_constant.push_back(size_c);
    sweep.grad_constant.push_back(grad_c);
  }
  sweep.size_drift = spread(sweep.size_constant);
  sweep.grad_drift = spread(sweep.grad_constant);
  return sweep;
}

TailBoundSweep check_tail_bound(const Kernel& k, const LacunarySequence& seq,
                                const std::vector<int>& starts, int samples_per_octave) {
  TailBoundSweep sweep;
  sweep.starts = starts;
  const int n = k.dim();
  const int m_top = seq.half_width();
  const auto dirs = bound_directions(n);
  for (int m : starts) {
    if (m < -m_top || m >= m_top)
      throw std::out_of_range("tail start outside materialized range");
    const WindowIndex tail{m, m_top};
    const double y_lo = seq.scale(-m_top) / 8.0;
    const double y_hi = seq.scale(m_top + 1) * 8.0;
    double c = 0.0;
    const double am_n = std::pow(seq.scale(m), n);
    // w = 0 included: the bound holds for all x, y
    c = std::max(c, am_n * std::abs(window_kernel(k, seq, tail, Point{})));
    for (double r : log_ladder(y_lo, y_hi, samples_per_octave))
      for (const auto& d : dirs)
        c = std::max(c, am_n * std::abs(window_kernel(k, seq, tail, scaled(d, r))));
    sweep.constant.push_back(c);
  }
  sweep.drift = spread(sweep.constant);
  return sweep;
}

// ---- maximal functions ----

std::vector<double> radius_ladder(const Grid& grid, double r_min, double r_max,
                                  int per_octave) {
  if (!(r_min > 0.0) || !(r_max > r_min))
    throw std::invalid_argument("radius ladder needs 0 < r_min < r_max");
  (void)grid;
  return log_ladder(r_min, r_max, per_octave);
}

std::vector<double> default_radius_ladder(const Grid& grid, int per_octave) {
  return radius_ladder(grid, 2.0 * grid.spacing(), grid.half_width() / 2.0, per_octave);
}

double hl_maximal(const SampledFunction& f, std::size_t x, std::span<const double> ladder) {
  if (ladder.empty()) throw std::invalid_argument("radius ladder must be nonempty");
  const Point center = f.grid().coord(x);
  double sup = 0.0;
  for (double r : ladder) {
    double sum = 0.0;
    std::size_t count = 0;
    for_each_ball_point(f.grid(), Ball{center, r}, [&](std::size_t i) {
      sum += std::abs(f[i]);
      ++count;
    });
    if (count > 0) sup = std::max(sup, sum / static_cast<double>(count));
  }
  return sup;
}

double lq_maximal(const SampledFunction& f, std::size_t x, double q,
                  std::span<const double> ladder) {
  if (!(q > 1.0)) throw std::invalid_argument("exponent q must exceed 1");
  if (ladder.empty()) throw std::invalid_argument("radius ladder must be nonempty");
  const Point center = f.grid().coord(x);
  double sup = 0.0;
  for (double r : ladder) {
    double sum = 0.0;
    std::size_t count = 0;
    for_each_ball_point(f.grid(), Ball{center, r}, [&](std::size_t i) {
      sum += std::pow(std::abs(f[i]), q);
      ++count;
    });
    if (count > 0)
      sup = std::max(sup, std::pow(sum / static_cast<double>(count), 1.0 / q));
  }
  return sup;
}

CotlarReport cotlar_check(const SampledFunction& f, const Kernel& k,
                          const LacunarySequence& seq, int truncation, double q,
                          std::span<const std::size_t> x_samples,
                          std::span<const double> ladder, ConvBackend backend) {
  if (truncation <= 2) throw std::invalid_argument("truncation M must exceed 2");
  if (!(q > 1.0)) throw std::invalid_argument("exponent q must exceed 1");
  const auto lf = build_lacunary_field(f, k, seq, backend);
  const auto s_full =
      diff_transform_partial_function(lf, WindowIndex{-truncation, truncation});

  CotlarReport rep;
  rep.truncation = truncation;
  rep.q = q;
  rep.ratios.assign(x_samples.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> nums(x_samples.size());
  parallel_for(x_samples.size(), [&](std::size_t s) {
    const std::size_t x = x_samples[s];
    const double num = diff_transform_maximal(lf, truncation, x);
    const double den = hl_maximal(s_full, x, ladder) + lq_maximal(f, x, q, ladder);
    nums[s] = num;
    if (den > 0.0) rep.ratios[s] = num / den;
  });
  for (std::size_t s = 0; s < x_samples.size(); ++s) {
    if (std::isnan(rep.ratios[s])) {
      if (nums[s] > 1e-14) {
        rep.zero_denominator_failure = true;
      } else {
        ++rep.skipped;
      }
      continue;
    }
    ++rep.evaluated;
    rep.max_ratio = std::max(rep.max_ratio, rep.ratios[s]);
  }
  return rep;
}

}  // namespace varops
