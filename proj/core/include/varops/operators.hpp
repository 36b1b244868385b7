#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varops/grid.hpp"
#include "varops/kernels.hpp"
#include "varops/semigroup.hpp"

namespace varops {

// delta-lacunary scale ladder a_{-M..M+1} with aligned weights v_{-M..M}.
// Scales extend one index past M so windows ending at N2 = M stay computable
// (the Cotlar comparison needs S_{(-M,M)}).
class LacunarySequence {
 public:
  // strong_ratio additionally enforces a_{i+1}/a_i <= delta^2.
  LacunarySequence(double delta, int half_width, std::vector<double> scales,
                   std::vector<double> weights, bool strong_ratio);

  static LacunarySequence geometric(double delta, int half_width, double center_scale,
                                    std::vector<double> weights, bool strong_ratio = true);

  double delta() const { return delta_; }
  int half_width() const { return m_; }
  bool strong_ratio() const { return strong_; }

  // i in [-M, M+1]
  double scale(int i) const { return scales_.at(static_cast<std::size_t>(i + m_)); }
  // i in [-M, M]
  double weight(int i) const { return weights_.at(static_cast<std::size_t>(i + m_)); }
  double weight_sup() const { return weight_sup_; }

  const std::vector<double>& scales() const { return scales_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  double delta_;
  int m_;
  bool strong_;
  std::vector<double> scales_;
  std::vector<double> weights_;
  double weight_sup_;
};

enum class WeightPattern { ones, alternating, random_signs };
std::vector<double> make_weights(WeightPattern pattern, int half_width, std::uint64_t seed = 0);

// Window N1 <= i <= N2 of the differential transform, N1 < N2.
struct WindowIndex {
  int n1 = 0;
  int n2 = 1;
};

// A pointwise operator output on the input's grid, with provenance.
struct OperatorField {
  SampledFunction values;
  std::string op_name;
  std::string params;
};

// ---- oscillation and variation over a semigroup field ----

// ( sum_i interval_range(field, x, i)^2 )^(1/2); needs >= 2 base scales.
double oscillation(const SemigroupField& field, std::size_t x);
OperatorField oscillation_field(const SemigroupField& field);

struct VariationResult {
  double value = 0.0;
  // Flattened-scale indices of the maximizing decreasing subsequence.
  std::vector<int> subsequence;
};

// sup over decreasing subsequences of the flattened scale pool of
// ( sum |consecutive slice differences|^rho )^(1/rho), by longest-path DP on
// the scale DAG. rho must exceed 2.
VariationResult variation(const SemigroupField& field, std::size_t x, double rho);
OperatorField variation_field(const SemigroupField& field, double rho);

// ---- differential transform ----

// Slices Phi_{a_i} f for every materialized scale index i in [-M, M+1].
struct LacunaryField {
  LacunarySequence seq;
  Grid grid;
  std::vector<SampledFunction> slices;  // index i + M

  const SampledFunction& slice(int i) const {
    return slices.at(static_cast<std::size_t>(i + seq.half_width()));
  }
};

LacunaryField build_lacunary_field(const SampledFunction& f, const Kernel& k,
                                   const LacunarySequence& seq,
                                   ConvBackend backend = ConvBackend::spectral,
                                   bool parallel = true);

// sum_{i=N1..N2} v_i (Phi_{a_{i+1}} f(x) - Phi_{a_i} f(x))
double diff_transform_partial(const LacunaryField& lf, WindowIndex w, std::size_t x);
SampledFunction diff_transform_partial_function(const LacunaryField& lf, WindowIndex w);

// Truncated maximal transform S*_M: sup over -M+1 < N1 < N2 < M-1 of the
// absolute partial sums, via prefix sums and a running min/max scan (O(M)).
double diff_transform_maximal(const LacunaryField& lf, int truncation, std::size_t x);
OperatorField diff_transform_maximal_field(const LacunaryField& lf, int truncation);

// Same scan over every materialized window (N1 in [-M, M-1], N2 <= M); used
// to report the growth of the full maximal transform with M.
double diff_transform_maximal_full(const LacunaryField& lf, std::size_t x);

// ---- the convolution kernel of a window, evaluated analytically ----

// K_{a,v;N}(y) = sum_{i=N1..N2} v_i (phi_{a_{i+1}}(y) - phi_{a_i}(y))
double window_kernel(const Kernel& k, const LacunarySequence& seq, WindowIndex w,
                     const Point& y);
Point window_kernel_gradient(const Kernel& k, const LacunarySequence& seq, WindowIndex w,
                             const Point& y);

struct KernelBoundSweep {
  std::vector<int> truncations;       // M values
  std::vector<double> size_constant;  // sup_y |y|^n |K(y)|, full window per M
  std::vector<double> grad_constant;  // sup_y |y|^(n+1) |grad K(y)|
  double size_drift = 0.0;            // max/min - 1 across the sweep
  double grad_drift = 0.0;
};

// Empirical Lemma-2.5-style constants for a family of growing windows built
// from geometric ladders with the given delta and weight pattern.
KernelBoundSweep check_kernel_bounds(const Kernel& k, double delta, WeightPattern pattern,
                                     const std::vector<int>& truncations,
                                     int samples_per_octave = 16, std::uint64_t seed = 0);

struct TailBoundSweep {
  std::vector<int> starts;  // m values
  std::vector<double> constant;  // sup_y |K_{(m,M)}(y)| * a_m^n
  double drift = 0.0;
};

// sup_{x,y} |sum_{i=m..M} v_i (phi_{a_{i+1}} - phi_{a_i})(x - y)| a_m^n over a
// sweep of m, checking the upper-tail window bound is m-stable.
TailBoundSweep check_tail_bound(const Kernel& k, const LacunarySequence& seq,
                                const std::vector<int>& starts, int samples_per_octave = 16);

// ---- maximal functions and the Cotlar-type comparison ----

std::vector<double> radius_ladder(const Grid& grid, double r_min, double r_max,
                                  int per_octave);
std::vector<double> default_radius_ladder(const Grid& grid, int per_octave = 4);

// sup over ladder radii of the ball average of |f|.
double hl_maximal(const SampledFunction& f, std::size_t x, std::span<const double> ladder);
// sup over ladder radii of the ball q-mean of |f|; q must exceed 1.
double lq_maximal(const SampledFunction& f, std::size_t x, double q,
                  std::span<const double> ladder);

struct CotlarReport {
  int truncation = 0;
  double q = 0.0;
  double max_ratio = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // zero numerator and denominator
  std::vector<double> ratios;  // per sampled x, NaN when skipped
  bool zero_denominator_failure = false;
};

// Pointwise ratio S*_M f(x) / ( M(S_{(-M,M)} f)(x) + M_q f(x) ) over sample
// points; the paper bounds it by a constant independent of f and M.
CotlarReport cotlar_check(const SampledFunction& f, const Kernel& k,
                          const LacunarySequence& seq, int truncation, double q,
                          std::span<const std::size_t> x_samples,
                          std::span<const double> ladder,
                          ConvBackend backend = ConvBackend::spectral);

}  // namespace varops
