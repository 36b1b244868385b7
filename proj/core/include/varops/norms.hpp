#pragma once

#include <limits>
#include <vector>

#include "varops/grid.hpp"
#include "varops/operators.hpp"

namespace varops {

// Discrete surrogate for "all balls": centers on grid points (optionally
// strided) crossed with a log-spaced radius ladder.
struct BallFamily {
  std::size_t center_stride = 1;
  std::vector<double> radii;

  // All centers, per_octave radii per octave from 2h to L/2.
  static BallFamily dense(const Grid& grid, int per_octave = 4,
                          std::size_t center_stride = 1);

  std::size_t center_count(const Grid& grid) const;
};

struct NormReport {
  double value = 0.0;
  Ball witness{};
  std::size_t centers = 0;
  std::size_t radii = 0;
};

// sup_B (1/|B|) int_B |f - f_B|
NormReport bmo_norm(const SampledFunction& f, const BallFamily& family);
// sup_B (1/|B|) int_B (f - min_B f) == sup_B (f_B - min_B f)
NormReport blo_norm(const SampledFunction& f, const BallFamily& family);

// Deviation integral on one ball; recomputes a report's value from its witness.
double ball_mean_abs_deviation(const SampledFunction& f, const Ball& ball);
double ball_mean_excess(const SampledFunction& f, const Ball& ball);

// (integrate |f|^p)^(1/p); sup norm for p = infinity. p >= 1 required.
double lp_norm(const SampledFunction& f, double p);
inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

struct BmoLemmaReport {
  bool skipped = false;       // constant input, statements vacuous
  double bmo = 0.0;
  // Empirical constants: max over tested (B, m) of LHS / (m * bmo) for the
  // dyadic-dilate statements, and LHS / bmo for the L2 mean oscillation.
  double dilate_mean_constant = 0.0;      // |f_B - f_{2^m B}| <= C m ||f||
  double l2_oscillation_constant = 0.0;   // L2 mean oscillation <= C ||f||
  double dilate_deviation_constant = 0.0; // mean over 2^m B of |f - f_B| <= C m ||f||
  std::size_t jensen_violations = 0;      // balls with L1 osc > L2 osc (must be 0)
  std::size_t balls_tested = 0;
  int max_m = 0;
};

BmoLemmaReport check_bmo_lemma(const SampledFunction& f, const BallFamily& family,
                               int max_m = 3);

struct RatioReport {
  bool skipped = false;  // constant input
  double operator_blo = 0.0;
  double input_bmo = 0.0;
  double ratio = 0.0;
  Ball blo_witness{};
};

// ||T f||_BLO / ||f||_BMO for an operator output; the BMO->BLO theorems bound
// this by a constant independent of f.
RatioReport bmo_blo_ratio(const OperatorField& op, const SampledFunction& input,
                          const BallFamily& family);

}  // namespace varops
