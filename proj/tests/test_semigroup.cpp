#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "varops/battery.hpp"
#include "varops/semigroup.hpp"

using namespace varops;

namespace {

SampledFunction random_function(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = gauss(rng);
  return SampledFunction(g, std::move(v));
}

double sup_diff(const SampledFunction& a, const SampledFunction& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace

TEST_CASE("convolution maps constants to constants") {
  const Grid g(1, 512, 20.0);
  const auto c = SampledFunction::from_function(g, [](const Point&) { return 2.5; });
  for (const char* name : {"gaussian", "poisson", "bump"}) {
    const auto k = make_kernel(name, 1);
    for (double t : {0.1, 1.0, 5.0}) {
      const auto out = convolve(c, *k, t);
      for (std::size_t i = 0; i < out.size(); i += 37)
        CHECK(out[i] == doctest::Approx(2.5).epsilon(1e-10));
    }
  }
}

TEST_CASE("gaussian convolved with gaussian adds variances") {
  const Grid g(1, 2048, 20.0);
  const double sigma = 1.5;
  const auto f = SampledFunction::from_function(g, [&](const Point& x) {
    return std::exp(-0.5 * x[0] * x[0] / (sigma * sigma)) /
           (sigma * std::sqrt(2.0 * std::numbers::pi));
  });
  const auto k = make_kernel("gaussian", 1);
  const double t = 2.0;
  const auto out = convolve(f, *k, t);
  const double s2 = sigma * sigma + t * t;
  for (std::size_t i = 0; i < g.size(); i += 97) {
    const double x = g.coord(i)[0];
    const double expected =
        std::exp(-0.5 * x * x / s2) / std::sqrt(2.0 * std::numbers::pi * s2);
    CHECK(out[i] == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("direct and spectral backends agree") {
  const Grid g(1, 256, 20.0);
  const auto f = random_function(g, 5);
  for (const char* name : {"gaussian", "poisson", "bump"}) {
    const auto k = make_kernel(name, 1);
    for (double t : {0.1, 1.0, 5.0}) {
      const auto a = convolve(f, *k, t, ConvBackend::direct);
      const auto b = convolve(f, *k, t, ConvBackend::spectral);
      CHECK(sup_diff(a, b) <= 1e-8);
    }
  }
  // verified path throws only on disagreement
  const auto k = make_kernel("gaussian", 1);
  CHECK_NOTHROW(convolve_verified(f, *k, 1.0));
  // n = 2 agreement
  const Grid g2(2, 32, 6.0);
  const auto f2 = random_function(g2, 6);
  const auto k2 = make_kernel("gaussian", 2);
  CHECK(sup_diff(convolve(f2, *k2, 0.8, ConvBackend::direct),
                 convolve(f2, *k2, 0.8, ConvBackend::spectral)) <= 1e-8);
}

TEST_CASE("convolution is translation covariant") {
  const Grid g(1, 128, 10.0);
  const auto f = random_function(g, 21);
  const auto k = make_kernel("gaussian", 1);
  const std::size_t shift = 17;
  SampledFunction shifted(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    shifted[(i + shift) % g.size()] = f[i];
  // grid-exact for the direct backend: identical summation order
  const auto direct = convolve(f, *k, 0.7, ConvBackend::direct);
  const auto direct_shifted = convolve(shifted, *k, 0.7, ConvBackend::direct);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(direct_shifted[(i + shift) % g.size()] == direct[i]);
  const auto spec = convolve(f, *k, 0.7);
  const auto spec_shifted = convolve(shifted, *k, 0.7);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(spec_shifted[(i + shift) % g.size()] == doctest::Approx(spec[i]).epsilon(1e-12));
}

TEST_CASE("convolution is linear in f") {
  const Grid g(1, 256, 10.0);
  const auto f = random_function(g, 31);
  const auto h = random_function(g, 32);
  const auto k = make_kernel("poisson", 1);
  SampledFunction combo(g);
  for (std::size_t i = 0; i < g.size(); ++i) combo[i] = 2.0 * f[i] - 0.5 * h[i];
  const auto a = convolve(combo, *k, 1.3);
  const auto cf = convolve(f, *k, 1.3);
  const auto ch = convolve(h, *k, 1.3);
  for (std::size_t i = 0; i < g.size(); i += 13)
    CHECK(a[i] == doctest::Approx(2.0 * cf[i] - 0.5 * ch[i]).epsilon(1e-12));
}

TEST_CASE("mass defect reporting") {
  const Grid g(1, 512, 20.0);
  ConvolveStats stats;
  const auto gauss = make_kernel("gaussian", 1);
  (void)sampled_dilation(g, *gauss, 1.0, &stats);
  CHECK(stats.mass_defect < 1e-8);
  CHECK(!stats.mass_warning);
  const auto poisson = make_kernel("poisson", 1);
  (void)sampled_dilation(g, *poisson, 5.0, &stats);
  CHECK(stats.mass_defect > 1e-3);  // heavy tail outside the box
  CHECK(stats.mass_warning);
}

TEST_CASE("time grid construction and refinement") {
  CHECK_THROWS_AS(TimeGrid({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({1.0, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({1.0, 0.5}, 0), std::invalid_argument);

  const TimeGrid dyadic = TimeGrid::dyadic(12, 8, 1.0);
  CHECK(dyadic.scales().size() == 12);
  CHECK(dyadic.scales()[0] == 1.0);
  CHECK(dyadic.scales()[11] == doctest::Approx(std::pow(2.0, -11)));
  CHECK(dyadic.points_per_interval() == 9);
  CHECK(dyadic.flattened().size() == 11u * 8u + 1u);

  // endpoints only for R <= 2
  const TimeGrid plain({4.0, 2.0, 1.0}, 2);
  CHECK(plain.flattened().size() == 3);
  CHECK(plain.interval_span(0) == std::pair<int, int>{0, 1});

  // sub-grids include both endpoints and nest across refinements
  const TimeGrid coarse({4.0, 1.0}, 4);
  const TimeGrid fine({4.0, 1.0}, 8);
  for (double tc : coarse.flattened()) {
    bool found = false;
    for (double tf : fine.flattened())
      if (std::abs(tf - tc) <= 1e-12 * tc) found = true;
    CHECK(found);
  }
  CHECK(coarse.flattened().front() == 4.0);
  CHECK(coarse.flattened().back() == 1.0);
}

TEST_CASE("build_field: singleton, constants, spreading, cache") {
  const Grid g(1, 256, 12.0);
  const auto k = make_kernel("gaussian", 1);

  const auto f = random_function(g, 51);
  const auto single = build_field(f, *k, TimeGrid({1.0}));
  CHECK(single.slices.size() == 1);
  CHECK(sup_diff(single.slices[0], convolve(f, *k, 1.0)) == 0.0);

  const auto c = SampledFunction::from_function(g, [](const Point&) { return -1.25; });
  const auto cf = build_field(c, *k, TimeGrid::dyadic(4, 2, 1.0));
  for (const auto& slice : cf.slices)
    for (std::size_t i = 0; i < slice.size(); i += 19)
      CHECK(slice[i] == doctest::Approx(-1.25).epsilon(1e-10));

  // heat-type spreading: narrow profile, watch a faraway point grow with t
  const auto narrow = SampledFunction::from_function(g, [](const Point& x) {
    return std::exp(-8.0 * x[0] * x[0]);
  });
  const TimeGrid times({4.0, 2.0, 1.0, 0.5, 0.25}, 2);
  const auto field = build_field(narrow, *k, times);
  const std::size_t far = g.nearest_index(make_point(5.0));
  for (std::size_t j = 0; j + 1 < field.slices.size(); ++j) {
    // slices are ordered by decreasing t
    CHECK(field.slices[j][far] >= field.slices[j + 1][far]);
    CHECK(sup_diff(field.slices[j],
                   convolve(narrow, *k, times.flattened()[j], ConvBackend::direct)) <= 1e-8);
  }

  // cache round-trip: second build loads identical slices
  const auto cache = std::filesystem::temp_directory_path() / "varops_cache_test";
  std::filesystem::remove_all(cache);
  BuildOptions opts;
  opts.cache_dir = cache;
  const auto first = build_field(f, *k, times, opts);
  const auto second = build_field(f, *k, times, opts);
  for (std::size_t j = 0; j < first.slices.size(); ++j)
    CHECK(sup_diff(first.slices[j], second.slices[j]) == 0.0);
  CHECK(!std::filesystem::is_empty(cache));
  std::filesystem::remove_all(cache);
}

TEST_CASE("interval_range: constants, two points, all-pairs oracle") {
  const Grid g(1, 64, 8.0);
  const auto k = make_kernel("gaussian", 1);

  const auto c = SampledFunction::from_function(g, [](const Point&) { return 3.0; });
  const auto cfield = build_field(c, *k, TimeGrid::dyadic(3, 2, 1.0));
  CHECK(interval_range(cfield, 5, 0) <= 1e-12);

  // R = 2: range over the endpoints is exactly |slice_i - slice_{i+1}|
  const auto f = random_function(g, 61);
  const auto two = build_field(f, *k, TimeGrid::dyadic(4, 2, 1.0));
  for (int i = 0; i < two.times.interval_count(); ++i)
    for (std::size_t x = 0; x < g.size(); x += 11)
      CHECK(interval_range(two, x, i) ==
            std::abs(two.slice_at(i, x) - two.slice_at(i + 1, x)));

  // all-pairs sup oracle on a refined interval (bitwise equality)
  const auto fine = build_field(f, *k, TimeGrid::dyadic(3, 8, 1.0));
  for (int i = 0; i < fine.times.interval_count(); ++i) {
    const auto [first, last] = fine.times.interval_span(i);
    for (std::size_t x = 0; x < g.size(); x += 7) {
      double brute = 0.0;
      for (int a = first; a <= last; ++a)
        for (int b = a + 1; b <= last; ++b)
          brute = std::max(brute, std::abs(fine.slice_at(a, x) - fine.slice_at(b, x)));
      CHECK(interval_range(fine, x, i) == brute);
    }
  }
  CHECK_THROWS_AS(interval_range(fine, 0, 99), std::out_of_range);

  // refinement monotonicity: nested pools never shrink the range
  const auto coarse = build_field(f, *k, TimeGrid::dyadic(3, 4, 1.0));
  for (int i = 0; i < coarse.times.interval_count(); ++i)
    for (std::size_t x = 0; x < g.size(); ++x)
      CHECK(interval_range(fine, x, i) >= interval_range(coarse, x, i));
}
