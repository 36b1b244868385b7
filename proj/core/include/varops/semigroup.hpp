#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "varops/grid.hpp"
#include "varops/kernels.hpp"

namespace varops {

enum class ConvBackend { direct, spectral };

struct ConvolveStats {
  // |1 - h^n sum(raw kernel samples)|: mass lost outside the box plus
  // discretization error, before renormalization.
  double mass_defect = 0.0;
  bool mass_warning = false;  // defect above 1e-8
};

// Grid samples of phi_t at wrapped displacements, renormalized to exact unit
// sum h^n * sum == 1 so convolution maps constants to constants exactly.
std::vector<double> sampled_dilation(const Grid& grid, const Kernel& k, double t,
                                     ConvolveStats* stats = nullptr);

// Periodic convolution (phi_t * f) on the grid. The spectral backend is the
// default path; direct quadrature is the verification oracle.
SampledFunction convolve(const SampledFunction& f, const Kernel& k, double t,
                         ConvBackend backend = ConvBackend::spectral,
                         ConvolveStats* stats = nullptr);

// Runs both backends and throws if they disagree beyond tol in sup norm.
SampledFunction convolve_verified(const SampledFunction& f, const Kernel& k, double t,
                                  double tol = 1e-8);

// Scales t_1 > ... > t_K > 0 with optional per-interval refinement: the
// requested R is rounded up to the smallest nested dyadic sub-grid with at
// least R log-spaced samples per interval [t_{i+1}, t_i] (endpoints always
// included, adjacent intervals share them). Dyadic nesting makes sub-grids
// for R1 <= R2 genuine subsets, so interval suprema and variation values are
// nondecreasing under refinement — the convergence diagnostic relies on it.
// R == 1 or 2 means endpoints only.
class TimeGrid {
 public:
  TimeGrid(std::vector<double> scales, int refinement = 1);

  static TimeGrid dyadic(int count = 12, int refinement = 8, double first = 1.0);

  const std::vector<double>& scales() const { return scales_; }
  int refinement() const { return refinement_; }
  // Samples per interval after dyadic rounding, endpoints included.
  int points_per_interval() const { return points_per_interval_; }
  // All sub-scales, strictly decreasing, refinement included.
  const std::vector<double>& flattened() const { return flattened_; }
  int interval_count() const { return static_cast<int>(scales_.size()) - 1; }
  // Flattened index range [first, last] covering interval i (0-based,
  // interval i spans [t_{i+1}, t_i]).
  std::pair<int, int> interval_span(int i) const;

  bool operator==(const TimeGrid& other) const {
    return scales_ == other.scales_ && refinement_ == other.refinement_;
  }

 private:
  std::vector<double> scales_;
  int refinement_;
  int points_per_interval_;
  std::vector<double> flattened_;
};

// The t-indexed family {Phi_t f} evaluated over a time grid: one slice per
// flattened scale, all on the base grid.
struct SemigroupField {
  SampledFunction base;
  TimeGrid times;
  std::vector<SampledFunction> slices;  // slices[j] = Phi_{flattened[j]} f

  double slice_at(int flat_scale, std::size_t x) const {
    return slices[static_cast<std::size_t>(flat_scale)][x];
  }
};

struct BuildOptions {
  ConvBackend backend = ConvBackend::spectral;
  bool parallel = true;
  // When set, slices are read from / written to a versioned cache file keyed
  // by (kernel, grid, time grid, backend).
  std::optional<std::filesystem::path> cache_dir;
};

SemigroupField build_field(const SampledFunction& f, const Kernel& k, const TimeGrid& times,
                           const BuildOptions& opts = {});

// sup over pairs t_{i+1} <= eps' < eps <= t_i of |Phi_eps f(x) - Phi_eps' f(x)|
// over the interval's sub-grid; equals max - min of the slice values (the sup
// of pairwise |a - b| over a finite set is its range).
double interval_range(const SemigroupField& field, std::size_t x, int interval);

// Cache key for (kernel, grid, times, backend); stable across runs.
std::uint64_t field_cache_key(const Grid& grid, const Kernel& k, const TimeGrid& times,
                              ConvBackend backend);

}  // namespace varops
