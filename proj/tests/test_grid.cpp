#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "varops/grid.hpp"
#include "varops/io.hpp"

using namespace varops;

namespace {

SampledFunction random_function(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = gauss(rng);
  return SampledFunction(g, std::move(v));
}

}  // namespace

TEST_CASE("grid invariants") {
  const Grid g(2, 64, 5.0);
  CHECK(g.spacing() == doctest::Approx(10.0 / 64));
  CHECK(g.size() == 64u * 64u);
  CHECK(g.box_volume() == doctest::Approx(100.0));

  // every flat index maps to a unique coordinate in [-L, L)^n
  for (std::size_t i : {std::size_t{0}, std::size_t{63}, std::size_t{64}, g.size() - 1}) {
    const Point x = g.coord(i);
    for (int a = 0; a < 2; ++a) {
      CHECK(x[a] >= -5.0);
      CHECK(x[a] < 5.0);
    }
    CHECK(g.nearest_index(x) == i);
  }

  // periodic distance bounded by L sqrt(n)
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    const double d = g.periodic_distance(g.coord(pick(rng)), g.coord(pick(rng)));
    CHECK(d <= 5.0 * std::sqrt(2.0) + 1e-12);
  }

  CHECK_THROWS_AS(Grid(0, 64, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1, 1, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1, 64, -1.0), std::invalid_argument);
}

TEST_CASE("integrate: constants, odd symmetry, gaussian mass") {
  const Grid g1(1, 4096, 20.0);
  const auto ones = SampledFunction::from_function(g1, [](const Point&) { return 1.0; });
  CHECK(integrate(ones) == doctest::Approx(40.0).epsilon(1e-13));

  const Grid g2(2, 64, 3.0);
  const auto ones2 = SampledFunction::from_function(g2, [](const Point&) { return 1.0; });
  CHECK(integrate(ones2) == doctest::Approx(36.0).epsilon(1e-13));

  const auto odd = SampledFunction::from_function(g1, [&](const Point& x) {
    return std::sin(std::numbers::pi * x[0] / g1.half_width());
  });
  CHECK(std::abs(integrate(odd)) < 1e-12);

  // standard gaussian on L = 20, P = 4096; oracle is the error function
  const Grid gl(1, 4096, 20.0);
  const auto gauss = SampledFunction::from_function(gl, [](const Point& x) {
    return std::exp(-0.5 * x[0] * x[0]) / std::sqrt(2.0 * std::numbers::pi);
  });
  const double oracle = std::erf(20.0 / std::sqrt(2.0));
  CHECK(std::abs(integrate(gauss) - oracle) < 1e-9);
}

TEST_CASE("integrate is linear") {
  const Grid g(1, 512, 8.0);
  const auto f = random_function(g, 1);
  const auto h = random_function(g, 2);
  const double alpha = 1.7;
  const double beta = -0.3;
  SampledFunction combo(g);
  for (std::size_t i = 0; i < g.size(); ++i) combo[i] = alpha * f[i] + beta * h[i];
  const double lhs = integrate(combo);
  const double rhs = alpha * integrate(f) + beta * integrate(h);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("non-finite samples are rejected") {
  const Grid g(1, 16, 1.0);
  std::vector<double> v(g.size(), 0.0);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SampledFunction(g, v), std::invalid_argument);
  v[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SampledFunction(g, v), std::invalid_argument);
  CHECK_THROWS_AS(SampledFunction(g, std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST_CASE("ball average: constants, odd symmetry, Riemann oracle") {
  const Grid g(1, 4096, 8.0);
  const auto c = SampledFunction::from_function(g, [](const Point&) { return 3.25; });
  for (double r : {0.01, 0.5, 2.0, 7.9})
    CHECK(ball_average(c, Ball{Point{}, r}) == doctest::Approx(3.25).epsilon(1e-14));

  const auto lin = SampledFunction::from_function(g, [](const Point& x) { return x[0]; });
  CHECK(std::abs(ball_average(lin, Ball{Point{}, 1.0})) < 1e-12);

  // regularized log|x| against an independent full-scan Riemann sum
  const double floor = g.spacing() / 2.0;
  const auto logf = SampledFunction::from_function(g, [&](const Point& x) {
    return std::log(std::max(std::abs(x[0]), floor));
  });
  const Ball b{Point{}, 1.0};
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.periodic_distance(g.coord(i), b.center) < b.radius) {
      sum += logf[i];
      ++count;
    }
  }
  CHECK(count > 0);
  CHECK(std::abs(ball_average(logf, b) - sum / count) < 1e-10);
  CHECK(ball_measure(g, b) == doctest::Approx(count * g.spacing()));
}

TEST_CASE("ball min/max: trivial and exhaustive oracle") {
  const Grid g(1, 128, 4.0);
  const auto absf = SampledFunction::from_function(g, [](const Point& x) {
    return std::abs(x[0]);
  });
  CHECK(ball_min(absf, Ball{Point{}, 1.0}) == 0.0);

  const auto f = random_function(g, 7);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> radius(0.1, 4.0);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    const Ball b{g.coord(pick(rng)), radius(rng)};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.periodic_distance(g.coord(i), b.center) < b.radius) {
        lo = std::min(lo, f[i]);
        hi = std::max(hi, f[i]);
      }
    }
    CHECK(ball_min(f, b) == lo);
    CHECK(ball_max(f, b) == hi);
    const double avg = ball_average(f, b);
    CHECK(avg >= lo);
    CHECK(avg <= hi);
  }
}

TEST_CASE("empty ball is an explicit error") {
  const Grid g(1, 64, 4.0);
  const auto f = random_function(g, 3);
  // off-grid center, radius below h/2: no member points
  Ball b{make_point(g.spacing() * 0.5), g.spacing() * 0.25};
  CHECK_THROWS_AS(ball_average(f, b), std::domain_error);
  CHECK_THROWS_AS(ball_min(f, b), std::domain_error);
  CHECK_THROWS_AS(ball_average(f, Ball{Point{}, 0.0}), std::invalid_argument);
}

TEST_CASE("enlarging the radius by one spacing never loses points") {
  const Grid g(2, 32, 2.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> radius(0.05, 2.0);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  for (int trial = 0; trial < 40; ++trial) {
    const Point c = g.coord(pick(rng));
    const double r = radius(rng);
    CHECK(ball_point_count(g, Ball{c, r + g.spacing()}) >= ball_point_count(g, Ball{c, r}));
  }
}

TEST_CASE("function serialization round-trips") {
  const Grid g(2, 16, 2.5);
  const auto f = random_function(g, 11);
  const auto path = std::filesystem::temp_directory_path() / "varops_roundtrip.bin";
  save_function(f, path);
  const auto back = load_function(path);
  CHECK(back.grid() == f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);

  const auto csv = std::filesystem::temp_directory_path() / "varops_samples.csv";
  save_function_csv(f, csv);
  CHECK(std::filesystem::file_size(csv) > 0);
  std::filesystem::remove(path);
  std::filesystem::remove(csv);

  CHECK_THROWS(load_function(std::filesystem::temp_directory_path() / "varops_missing.bin"));
}
