#include "varops/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace varops {

namespace {

// Composite Simpson on [a, b] with n subintervals (n made even).
template <class F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double radial_mass(int dim, const std::function<double(double)>& profile, double r_max) {
  const double surf = unit_sphere_area(dim);
  auto integrand = [&](double r) { return profile(r) * std::pow(r, dim - 1); };
  return surf * simpson(integrand, 0.0, r_max, 1 << 15);
}

std::vector<double> log_samples(double lo, double hi, int count) {
  std::vector<double> s(count);
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < count; ++i)
    s[i] = lo * std::exp(ratio * static_cast<double>(i) / (count - 1));
  return s;
}

std::vector<double> linear_samples(double lo, double hi, int count) {
  std::vector<double> s(count);
  for (int i = 0; i < count; ++i)
    s[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return s;
}

}  // namespace

double unit_sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0);
}

GaussianKernel::GaussianKernel(int dim)
    : Kernel(dim, "gaussian"),
      norm_(std::pow(2.0 * std::numbers::pi, -dim / 2.0)) {}

double GaussianKernel::value(const Point& x) const {
  return norm_ * std::exp(-0.5 * dot(x, x));
}

Point GaussianKernel::gradient(const Point& x) const {
  return scaled(x, -value(x));
}

double GaussianKernel::fourier_radial(double s) const { return std::exp(-0.5 * s * s); }

PoissonKernel::PoissonKernel(int dim)
    : Kernel(dim, "poisson"),
      cn_(std::tgamma((dim + 1) / 2.0) / std::pow(std::numbers::pi, (dim + 1) / 2.0)) {}

double PoissonKernel::value(const Point& x) const {
  return cn_ * std::pow(1.0 + dot(x, x), -(dim() + 1) / 2.0);
}

Point PoissonKernel::gradient(const Point& x) const {
  const double f = -cn_ * (dim() + 1) * std::pow(1.0 + dot(x, x), -(dim() + 3) / 2.0);
  return scaled(x, f);
}

double PoissonKernel::fourier_radial(double s) const { return std::exp(-s); }

BumpKernel::BumpKernel(int dim) : Kernel(dim, "bump"), norm_(1.0) {
  auto profile = [](double r) {
    const double q = 1.0 - r * r;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
  };
  norm_ = radial_mass(dim, profile, 1.0);
}

double BumpKernel::value(const Point& x) const {
  const double q = 1.0 - dot(x, x);
  return q > 0.0 ? std::exp(-1.0 / q) / norm_ : 0.0;
}

Point BumpKernel::gradient(const Point& x) const {
  const double q = 1.0 - dot(x, x);
  if (q <= 0.0) return Point{};
  return scaled(x, -2.0 * std::exp(-1.0 / q) / (q * q * norm_));
}

TabulatedKernel::TabulatedKernel(int dim, std::vector<double> radii,
                                 std::vector<double> samples, std::string name)
    : Kernel(dim, std::move(name)), r_(std::move(radii)), v_(std::move(samples)) {
  if (r_.size() != v_.size() || r_.size() < 4)
    throw std::invalid_argument("tabulated kernel needs >= 4 matching (r, value) samples");
  if (r_.front() != 0.0) throw std::invalid_argument("tabulated profile must start at r = 0");
  for (std::size_t i = 1; i < r_.size(); ++i)
    if (!(r_[i] > r_[i - 1])) throw std::invalid_argument("tabulated radii must increase");
  for (double v : v_)
    if (!std::isfinite(v)) throw std::invalid_argument("tabulated samples must be finite");

  // Clamped cubic spline (zero slope at both ends), second derivatives in m_.
  const std::size_t n = r_.size();
  m_.assign(n, 0.0);
  std::vector<double> u(n, 0.0);
  m_[0] = -0.5;
  u[0] = (3.0 / (r_[1] - r_[0])) * ((v_[1] - v_[0]) / (r_[1] - r_[0]));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double sig = (r_[i] - r_[i - 1]) / (r_[i + 1] - r_[i - 1]);
    const double p = sig * m_[i - 1] + 2.0;
    m_[i] = (sig - 1.0) / p;
    u[i] = (v_[i + 1] - v_[i]) / (r_[i + 1] - r_[i]) -
           (v_[i] - v_[i - 1]) / (r_[i] - r_[i - 1]);
    u[i] = (6.0 * u[i] / (r_[i + 1] - r_[i - 1]) - sig * u[i - 1]) / p;
  }
  const double qn = 0.5;
  const double un = (3.0 / (r_[n - 1] - r_[n - 2])) *
                    (-(v_[n - 1] - v_[n - 2]) / (r_[n - 1] - r_[n - 2]));
  m_[n - 1] = (un - qn * u[n - 2]) / (qn * m_[n - 2] + 1.0);
  for (std::size_t i = n - 1; i-- > 0;) m_[i] = m_[i] * m_[i + 1] + u[i];

  norm_ = radial_mass(dim, [this](double r) { return radial_raw(r); }, r_.back());
  if (!(std::abs(norm_) > 0.0))
    throw std::invalid_argument("tabulated profile has zero mass");
}

double TabulatedKernel::radial_raw(double r) const {
  if (r >= r_.back()) return 0.0;
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t hi = std::max<std::size_t>(1, static_cast<std::size_t>(it - r_.begin()));
  const std::size_t lo = hi - 1;
  const double w = r_[hi] - r_[lo];
  const double a = (r_[hi] - r) / w;
  const double b = (r - r_[lo]) / w;
  return a * v_[lo] + b * v_[hi] +
         ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * w * w / 6.0;
}

double TabulatedKernel::radial(double r) const { return radial_raw(r) / norm_; }

double TabulatedKernel::radial_derivative(double r) const {
  if (r >= r_.back()) return 0.0;
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t hi = std::max<std::size_t>(1, static_cast<std::size_t>(it - r_.begin()));
  const std::size_t lo = hi - 1;
  const double w = r_[hi] - r_[lo];
  const double a = (r_[hi] - r) / w;
  const double b = (r - r_[lo]) / w;
  const double d = (v_[hi] - v_[lo]) / w +
                   ((3.0 * b * b - 1.0) * m_[hi] - (3.0 * a * a - 1.0) * m_[lo]) * w / 6.0;
  return d / norm_;
}

double TabulatedKernel::value(const Point& x) const { return radial(norm(x)); }

Point TabulatedKernel::gradient(const Point& x) const {
  const double r = norm(x);
  if (r == 0.0 || r >= r_.back()) return Point{};
  return scaled(x, radial_derivative(r) / r);
}

std::unique_ptr<Kernel> make_kernel(std::string_view name, int dim) {
  if (name == "gaussian") return std::make_unique<GaussianKernel>(dim);
  if (name == "poisson") return std::make_unique<PoissonKernel>(dim);
  if (name == "bump") return std::make_unique<BumpKernel>(dim);
  throw std::invalid_argument("unknown kernel: " + std::string(name));
}

std::unique_ptr<Kernel> load_tabulated_kernel(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open kernel profile: " + path);
  std::vector<double> radii;
  std::vector<double> samples;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double r, v;
    if (ls >> r >> v) {
      radii.push_back(r);
      samples.push_back(v);
    }
  }
  return std::make_unique<TabulatedKernel>(dim, std::move(radii), std::move(samples));
}

static void require_scale(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw std::invalid_argument("dilation scale t must be positive and finite");
}

double dilate(const Kernel& k, double t, const Point& x) {
  require_scale(t);
  return std::pow(t, -k.dim()) * k.value(scaled(x, 1.0 / t));
}

double dilate_dt(const Kernel& k, double t, const Point& x) {
  require_scale(t);
  const Point u = scaled(x, 1.0 / t);
  const double core = k.dim() * k.value(u) + dot(u, k.gradient(u));
  return -core * std::pow(t, -(k.dim() + 1));
}

Point dilate_gradient(const Kernel& k, double t, const Point& x) {
  require_scale(t);
  return scaled(k.gradient(scaled(x, 1.0 / t)), std::pow(t, -(k.dim() + 1)));
}

double fourier_radial_numeric(const Kernel& k, double s, double r_max) {
  const int osc = static_cast<int>(std::ceil(s * r_max));
  const int n = std::max(4096, 32 * osc);
  switch (k.dim()) {
    case 1: {
      auto f = [&](double r) { return k.value(make_point(r)) * std::cos(s * r); };
      return 2.0 * simpson(f, 0.0, r_max, n);
    }
    case 2: {
      auto f = [&](double r) { return k.value(make_point(r)) * std::cyl_bessel_j(0.0, s * r) * r; };
      return 2.0 * std::numbers::pi * simpson(f, 0.0, r_max, n);
    }
    case 3: {
      auto f = [&](double r) {
        const double sr = s * r;
        const double sinc = sr == 0.0 ? 1.0 : std::sin(sr) / sr;
        return k.value(make_point(r)) * sinc * r * r;
      };
      return 4.0 * std::numbers::pi * simpson(f, 0.0, r_max, n);
    }
    default:
      throw std::logic_error("unsupported dimension");
  }
}

namespace {

std::vector<Point> sample_directions(int dim) {
  std::vector<Point> dirs;
  for (int a = 0; a < dim; ++a) {
    Point e{};
    e[a] = 1.0;
    dirs.push_back(e);
  }
  if (dim > 1) {
    Point d{};
    for (int a = 0; a < dim; ++a) d[a] = 1.0 / std::sqrt(static_cast<double>(dim));
    dirs.push_back(d);
  }
  return dirs;
}

// Pairs (b_i, b_j) plus near-coincident pairs (b, b + 1e-3): the difference
// estimates peak as x -> y, so tight pairs must be present at every sampling
// level for the refinement drift to reflect true convergence.
std::vector<std::pair<double, double>> sample_pairs(const std::vector<double>& betas) {
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < betas.size(); ++i)
    for (std::size_t j = i + 1; j < betas.size(); ++j)
      pairs.emplace_back(betas[i], betas[j]);
  for (double b : betas)
    if (b + 1e-3 <= 0.9) pairs.emplace_back(b, b + 1e-3);
  return pairs;
}

}  // namespace

DerivativeBoundsReport check_derivative_bounds(const Kernel& k, const Ball& ball,
                                               int base_samples) {
  if (base_samples < 8) throw std::invalid_argument("need at least 8 base samples");
  const int n = k.dim();
  const double r = ball.radius;
  if (!(r > 0.0)) throw std::invalid_argument("degenerate reference ball");
  const Point x0 = ball.center;
  const auto dirs = sample_directions(n);

  // level 0 = coarse, level 1 = refined 2x with nested sample points
  auto sup_at = [&](int level, auto&& body) {
    const int m = base_samples * (level + 1);
    return body(m);
  };

  DerivativeBoundsReport rep;
  rep.base_samples = base_samples;

  auto estimate = [&](auto&& body) {
    BoundEstimate e;
    e.coarse = sup_at(0, body);
    e.fine = sup_at(1, body);
    return e;
  };

  // (i) |d/dt phi_t(x)| (t + |x|)^(n+1), t in [0.05, 5], |x| <= 10
  rep.pointwise = estimate([&](int m) {
    double sup = 0.0;
    for (double t : log_samples(0.05, 5.0, m + 1))
      for (const auto& d : dirs)
        for (double a : linear_samples(-10.0, 10.0, 2 * m + 1)) {
          const Point x = scaled(d, a);
          const double ratio =
              std::abs(dilate_dt(k, t, x)) * std::pow(t + norm(x), n + 1);
          sup = std::max(sup, ratio);
        }
    return sup;
  });

  // (ii) x in B(x0,r), y outside 2B: |d/dt phi_t(x-y)| |y-x0|^(n+1)
  rep.outer = estimate([&](int m) {
    double sup = 0.0;
    const auto betas = linear_samples(-0.9, 0.9, m / 2 + 1);
    const auto gammas = log_samples(2.05, 32.0, m + 1);
    const auto ts = log_samples(0.02 * r, 50.0 * r, m + 1);
    for (const auto& d : dirs)
      for (double b : betas) {
        const Point x = x0 + scaled(d, b * r);
        for (double gsign : {-1.0, 1.0})
          for (double g : gammas) {
            const Point y = x0 + scaled(d, gsign * g * r);
            const double dist = g * r;
            for (double t : ts) {
              const double ratio =
                  std::abs(dilate_dt(k, t, x - y)) * std::pow(dist, n + 1);
              sup = std::max(sup, ratio);
            }
          }
      }
    return sup;
  });

  // (iii) x,y in B, z in 2B: |d/dt(phi_t(x-z) - phi_t(y-z))| t^(n+2) / |x-y|
  rep.difference_in = estimate([&](int m) {
    double sup = 0.0;
    const auto pairs = sample_pairs(linear_samples(-0.9, 0.9, m / 4 + 1));
    const auto zetas = linear_samples(-0.95, 0.95, m / 2 + 1);
    const auto ts = log_samples(1e-2 * r, 1e3 * r, m + 1);
    for (const auto& d : dirs)
      for (const auto& [b1, b2] : pairs) {
        const Point x = x0 + scaled(d, b1 * r);
        const Point y = x0 + scaled(d, b2 * r);
        const double sep = norm(x - y);
        if (sep == 0.0) continue;
        for (double zt : zetas) {
          const Point z = x0 + scaled(d, zt * 2.0 * r);
          for (double t : ts) {
            const double lhs =
                std::abs(dilate_dt(k, t, x - z) - dilate_dt(k, t, y - z));
            sup = std::max(sup, lhs * std::pow(t, n + 2) / sep);
          }
        }
      }
    return sup;
  });

  // (iv) z outside 2B: |d/dt(...)| t^(3/2) |z-x0|^(n+1/2) / |x-y|
  rep.difference_out = estimate([&](int m) {
    double sup = 0.0;
    const auto pairs = sample_pairs(linear_samples(-0.9, 0.9, m / 4 + 1));
    const auto zetas = log_samples(2.05, 32.0, m / 2 + 1);
    const auto ts = log_samples(1e-2 * r, 1e3 * r, m + 1);
    for (const auto& d : dirs)
      for (const auto& [b1, b2] : pairs) {
        const Point x = x0 + scaled(d, b1 * r);
        const Point y = x0 + scaled(d, b2 * r);
        const double sep = norm(x - y);
        if (sep == 0.0) continue;
        for (double zsign : {-1.0, 1.0})
          for (double zt : zetas) {
            const Point z = x0 + scaled(d, zsign * zt * r);
            const double dist = zt * r;
            for (double t : ts) {
              const double lhs =
                  std::abs(dilate_dt(k, t, x - z) - dilate_dt(k, t, y - z));
              sup = std::max(sup,
                             lhs * std::pow(t, 1.5) * std::pow(dist, n + 0.5) / sep);
            }
          }
      }
    return sup;
  });

  return rep;
}

}  // namespace varops
