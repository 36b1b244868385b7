#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varops/grid.hpp"

namespace varops {

// f(x) = sign * log(max(dist(x, center), h/2)): the canonical unbounded BMO
// function, regularized at the grid scale; distances are periodic.
SampledFunction log_distance_function(const Grid& grid, const Point& center,
                                      double sign = 1.0);

// Seeded random trigonometric polynomial of the given degree, periodic on the
// box; coefficients ~ N(0,1) scaled by |k|^-1/2.
SampledFunction random_trig_polynomial(const Grid& grid, int degree, std::uint64_t seed);

// Smoothed square wave tanh(sin(pi x1 / L) / sharpness): periodic smoothed
// step, stresses interval suprema.
SampledFunction smooth_step_function(const Grid& grid, double sharpness = 0.2);

struct TestFunction {
  std::string name;
  SampledFunction f;
};

struct BatterySpec {
  int trig_degree = 32;
  int trig_count = 2;
  std::uint64_t seed = 2026;
  double step_sharpness = 0.2;
  bool include_constant = false;  // adds one constant input (skip-path probe)
};

// Default test battery: regularized log at the origin, three shifted logs,
// seeded random trig polynomials, a smoothed step.
std::vector<TestFunction> make_battery(const Grid& grid, const BatterySpec& spec);

}  // namespace varops
