#include "varops/grid.hpp"

#include <limits>

namespace varops {

Grid::Grid(int dim, int points_per_axis, double half_width)
    : dim_(dim), p_(points_per_axis), l_(half_width) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("grid dimension must be in [1, 3]");
  if (points_per_axis < 2) throw std::invalid_argument("points_per_axis must be >= 2");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("half_width must be positive and finite");
  h_ = 2.0 * l_ / static_cast<double>(p_);
  size_ = 1;
  cell_volume_ = 1.0;
  for (int a = 0; a < dim_; ++a) {
    size_ *= static_cast<std::size_t>(p_);
    cell_volume_ *= h_;
  }
}

double Grid::box_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= 2.0 * l_;
  return v;
}

std::array<std::int64_t, kMaxDim> Grid::axis_indices(std::size_t flat) const {
  std::array<std::int64_t, kMaxDim> idx{};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = static_cast<std::int64_t>(flat % static_cast<std::size_t>(p_));
    flat /= static_cast<std::size_t>(p_);
  }
  return idx;
}

std::size_t Grid::flat_index(std::span<const std::int64_t> axis) const {
  std::size_t flat = 0;
  std::size_t stride = 1;
  for (int a = 0; a < dim_; ++a) {
    flat += static_cast<std::size_t>(axis[a]) * stride;
    stride *= static_cast<std::size_t>(p_);
  }
  return flat;
}

std::size_t Grid::wrap_index(const std::array<std::int64_t, kMaxDim>& axis) const {
  std::size_t flat = 0;
  std::size_t stride = 1;
  for (int a = 0; a < dim_; ++a) {
    std::int64_t k = axis[a] % p_;
    if (k < 0) k += p_;
    flat += static_cast<std::size_t>(k) * stride;
    stride *= static_cast<std::size_t>(p_);
  }
  return flat;
}

Point Grid::coord(std::size_t flat) const {
  const auto idx = axis_indices(flat);
  Point x{};
  for (int a = 0; a < dim_; ++a) x[a] = -l_ + static_cast<double>(idx[a]) * h_;
  return x;
}

std::size_t Grid::nearest_index(const Point& x) const {
  std::array<std::int64_t, kMaxDim> idx{};
  for (int a = 0; a < dim_; ++a) idx[a] = std::llround((x[a] + l_) / h_);
  return wrap_index(idx);
}

double Grid::wrap_component(double dx) const {
  const double period = 2.0 * l_;
  double w = dx - period * std::round(dx / period);
  if (w >= l_) w -= period;
  if (w < -l_) w += period;
  return w;
}

Point Grid::displacement(const Point& from, const Point& to) const {
  Point d{};
  for (int a = 0; a < dim_; ++a) d[a] = wrap_component(to[a] - from[a]);
  return d;
}

double Grid::periodic_distance(const Point& a, const Point& b) const {
  return norm(displacement(a, b));
}

SampledFunction::SampledFunction(const Grid& grid)
    : grid_(grid), values_(grid.size(), 0.0) {}

SampledFunction::SampledFunction(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("sample count does not match grid size");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("samples must be finite");
}

double kahan_sum(std::span<const double> v) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double integrate(const SampledFunction& f) {
  return f.grid().cell_volume() * kahan_sum(f.values());
}

std::size_t ball_point_count(const Grid& grid, const Ball& ball) {
  std::size_t n = 0;
  for_each_ball_point(grid, ball, [&](std::size_t) { ++n; });
  return n;
}

double ball_measure(const Grid& grid, const Ball& ball) {
  return static_cast<double>(ball_point_count(grid, ball)) * grid.cell_volume();
}

BallMoments ball_moments(const SampledFunction& f, const Ball& ball) {
  BallMoments m;
  m.min = std::numeric_limits<double>::infinity();
  m.max = -std::numeric_limits<double>::infinity();
  for_each_ball_point(f.grid(), ball, [&](std::size_t i) {
    const double v = f[i];
    ++m.count;
    m.sum += v;
    if (v < m.min) m.min = v;
    if (v > m.max) m.max = v;
  });
  if (m.count == 0) throw std::domain_error("ball contains no grid points");
  return m;
}

double ball_average(const SampledFunction& f, const Ball& ball) {
  const BallMoments m = ball_moments(f, ball);
  return m.sum / static_cast<double>(m.count);
}

double ball_min(const SampledFunction& f, const Ball& ball) {
  return ball_moments(f, ball).min;
}

double ball_max(const SampledFunction& f, const Ball& ball) {
  return ball_moments(f, ball).max;
}

}  // namespace varops
