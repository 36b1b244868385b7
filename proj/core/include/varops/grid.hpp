#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace varops {

// Functions live on a uniform periodic grid over the box [-L, L)^n.
// Dimensions 1..3 are supported through one fixed-capacity point type;
// components at or beyond dim() are zero.
inline constexpr int kMaxDim = 3;
using Point = std::array<double, kMaxDim>;

inline Point make_point(double x) { return {x, 0.0, 0.0}; }
inline Point make_point(double x, double y) { return {x, y, 0.0}; }
inline Point make_point(double x, double y, double z) { return {x, y, z}; }

inline double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline Point scaled(const Point& a, double s) {
  return {a[0] * s, a[1] * s, a[2] * s};
}
inline Point operator+(const Point& a, const Point& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Point operator-(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

class Grid {
 public:
  // dim in [1, kMaxDim]; points_per_axis >= 2 (powers of two recommended
  // for the spectral backend); half_width L > 0. Spacing h = 2L/P.
  Grid(int dim, int points_per_axis, double half_width);

  int dim() const { return dim_; }
  int points_per_axis() const { return p_; }
  double half_width() const { return l_; }
  double spacing() const { return h_; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }
  double box_volume() const;

  // Flat index <-> per-axis indices <-> coordinates. Axis index k maps to
  // coordinate -L + k*h, k in [0, P).
  std::array<std::int64_t, kMaxDim> axis_indices(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::int64_t> axis) const;
  // Periodic: any integer tuple is reduced mod P per active axis; inactive
  // axis entries must be zero.
  std::size_t wrap_index(const std::array<std::int64_t, kMaxDim>& axis) const;
  Point coord(std::size_t flat) const;
  std::size_t nearest_index(const Point& x) const;

  // Signed displacement reduced to [-L, L) per axis.
  double wrap_component(double dx) const;
  Point displacement(const Point& from, const Point& to) const;
  double periodic_distance(const Point& a, const Point& b) const;

  bool operator==(const Grid& other) const = default;

 private:
  int dim_;
  int p_;
  double l_;
  double h_;
  std::size_t size_;
  double cell_volume_;
};

class SampledFunction {
 public:
  explicit SampledFunction(const Grid& grid);
  SampledFunction(const Grid& grid, std::vector<double> values);

  template <class F>
  static SampledFunction from_function(const Grid& grid, F&& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.coord(i));
    return SampledFunction(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  Grid grid_;
  std::vector<double> values_;
};

struct Ball {
  Point center{};
  double radius = 0.0;
};

// Visits every grid point with periodic_distance(coord, center) < radius,
// each exactly once (open ball; balls wider than the box are clamped to one
// period per axis).
template <class Fn>
void for_each_ball_point(const Grid& g, const Ball& ball, Fn&& fn) {
  if (!(ball.radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  const std::int64_t p = g.points_per_axis();
  const double h = g.spacing();
  const double l = g.half_width();
  std::array<std::int64_t, kMaxDim> base{};
  std::array<std::int64_t, kMaxDim> lo{};
  std::array<std::int64_t, kMaxDim> hi{};
  for (int a = 0; a < g.dim(); ++a) {
    base[a] = static_cast<std::int64_t>(std::llround((ball.center[a] + l) / h));
    std::int64_t m = static_cast<std::int64_t>(std::ceil(ball.radius / h)) + 1;
    if (2 * m + 1 >= p) {
      lo[a] = -(p / 2);
      hi[a] = lo[a] + p - 1;
    } else {
      lo[a] = -m;
      hi[a] = m;
    }
  }
  std::array<std::int64_t, kMaxDim> idx{};
  for (std::int64_t o0 = lo[0]; o0 <= hi[0]; ++o0) {
    idx[0] = base[0] + o0;
    for (std::int64_t o1 = lo[1]; o1 <= hi[1]; ++o1) {
      idx[1] = base[1] + o1;
      for (std::int64_t o2 = lo[2]; o2 <= hi[2]; ++o2) {
        idx[2] = base[2] + o2;
        const std::size_t flat = g.wrap_index(idx);
        if (g.periodic_distance(g.coord(flat), ball.center) < ball.radius) fn(flat);
      }
    }
  }
}

// Compensated (Kahan) sum; deterministic regardless of evaluation threading.
double kahan_sum(std::span<const double> v);

// Midpoint-rule quadrature h^n * sum(values) over the periodic box.
double integrate(const SampledFunction& f);

std::size_t ball_point_count(const Grid& grid, const Ball& ball);
double ball_measure(const Grid& grid, const Ball& ball);  // count * h^n

struct BallMoments {
  std::size_t count = 0;
  double sum = 0.0;
  double min = 0.0;
  double max = 0.0;
};
// Throws std::domain_error when the ball contains no grid point.
BallMoments ball_moments(const SampledFunction& f, const Ball& ball);

double ball_average(const SampledFunction& f, const Ball& ball);
double ball_min(const SampledFunction& f, const Ball& ball);
double ball_max(const SampledFunction& f, const Ball& ball);

}  // namespace varops
