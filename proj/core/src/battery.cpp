#include "varops/battery.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace varops {

SampledFunction log_distance_function(const Grid& grid, const Point& center, double sign) {
  const double floor = grid.spacing() / 2.0;
  return SampledFunction::from_function(grid, [&](const Point& x) {
    return sign * std::log(std::max(grid.periodic_distance(x, center), floor));
  });
}

SampledFunction random_trig_polynomial(const Grid& grid, int degree, std::uint64_t seed) {
  if (degree < 1) throw std::invalid_argument("trig degree must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  struct Mode {
    std::array<int, kMaxDim> k{};
    double amp_cos = 0.0;
    double amp_sin = 0.0;
    double knorm = 1.0;
  };
  std::vector<Mode> modes;
  if (grid.dim() == 1) {
    for (int k = 1; k <= degree; ++k) {
      Mode m;
      m.k[0] = k;
      m.amp_cos = gauss(rng);
      m.amp_sin = gauss(rng);
      m.knorm = k;
      modes.push_back(m);
    }
  } else {
    std::uniform_int_distribution<int> pick(-degree, degree);
    const int count = std::min(degree, 24);
    while (static_cast<int>(modes.size()) < count) {
      Mode m;
      double sq = 0.0;
      for (int a = 0; a < grid.dim(); ++a) {
        m.k[a] = pick(rng);
        sq += static_cast<double>(m.k[a]) * m.k[a];
      }
      if (sq == 0.0) continue;
      m.amp_cos = gauss(rng);
      m.amp_sin = gauss(rng);
      m.knorm = std::sqrt(sq);
      modes.push_back(m);
    }
  }

  const double w = std::numbers::pi / grid.half_width();
  return SampledFunction::from_function(grid, [&](const Point& x) {
    double v = 0.0;
    for (const auto& m : modes) {
      double phase = 0.0;
      for (int a = 0; a < grid.dim(); ++a) phase += w * m.k[a] * x[a];
      const double scale = 1.0 / std::sqrt(m.knorm);
      v += scale * (m.amp_cos * std::cos(phase) + m.amp_sin * std::sin(phase));
    }
    return v;
  });
}

SampledFunction smooth_step_function(const Grid& grid, double sharpness) {
  const double w = std::numbers::pi / grid.half_width();
  return SampledFunction::from_function(grid, [&](const Point& x) {
    return std::tanh(std::sin(w * x[0]) / sharpness);
  });
}

std::vector<TestFunction> make_battery(const Grid& grid, const BatterySpec& spec) {
  std::vector<TestFunction> out;
  const double l = grid.half_width();
  out.push_back({"log_origin", log_distance_function(grid, Point{})});
  Point c1 = make_point(l / 4.0);
  Point c2 = make_point(-l / 3.0);
  Point c3 = make_point(l / 2.0);
  if (grid.dim() > 1) {
    c2[1] = l / 5.0;
    c3[1] = -l / 2.0;
  }
  out.push_back({"log_shift1", log_distance_function(grid, c1)});
  out.push_back({"log_shift2", log_distance_function(grid, c2)});
  out.push_back({"log_shift3", log_distance_function(grid, c3)});
  for (int i = 0; i < spec.trig_count; ++i) {
    out.push_back({"trig" + std::to_string(i + 1),
                   random_trig_polynomial(grid, spec.trig_degree, spec.seed + i)});
  }
  out.push_back({"smooth_step", smooth_step_function(grid, spec.step_sharpness)});
  if (spec.include_constant) {
    out.push_back({"constant",
                   SampledFunction::from_function(grid, [](const Point&) { return 1.0; })});
  }
  return out;
}

}  // namespace varops
