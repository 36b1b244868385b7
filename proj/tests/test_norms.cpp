#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "varops/battery.hpp"
#include "varops/norms.hpp"
#include "varops/semigroup.hpp"

using namespace varops;

namespace {

SampledFunction shift_values(const SampledFunction& f, double c) {
  SampledFunction out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] + c;
  return out;
}

}  // namespace

TEST_CASE("bmo norm: constants, homogeneity, shift invariance") {
  const Grid g(1, 512, 8.0);
  const auto fam = BallFamily::dense(g, 4, 4);

  const auto c = SampledFunction::from_function(g, [](const Point&) { return 11.0; });
  CHECK(bmo_norm(c, fam).value == 0.0);
  CHECK(blo_norm(c, fam).value == 0.0);

  const auto f = log_distance_function(g, Point{});
  const auto rep = bmo_norm(f, fam);
  CHECK(rep.value > 0.0);

  // witness recomputation
  CHECK(ball_mean_abs_deviation(f, rep.witness) ==
        doctest::Approx(rep.value).epsilon(1e-12));

  // homogeneity |alpha| and exact shift invariance
  SampledFunction scaledf(g);
  for (std::size_t i = 0; i < g.size(); ++i) scaledf[i] = -3.0 * f[i];
  CHECK(bmo_norm(scaledf, fam).value == doctest::Approx(3.0 * rep.value).epsilon(1e-12));
  CHECK(bmo_norm(shift_values(f, 4.25), fam).value ==
        doctest::Approx(rep.value).epsilon(1e-12));

  const auto blo = blo_norm(f, fam);
  CHECK(blo.value >= 0.0);
  CHECK(blo_norm(shift_values(f, -2.0), fam).value ==
        doctest::Approx(blo.value).epsilon(1e-12));
  CHECK(ball_mean_excess(f, blo.witness) == doctest::Approx(blo.value).epsilon(1e-12));
}

TEST_CASE("bmo norm of log is dilation invariant within 5%") {
  // log(lambda x) = log lambda + log x, and BMO kills constants; discretely
  // the invariance is approximate at the regularization scale
  const Grid g(1, 4096, 8.0);
  const auto fam = BallFamily::dense(g, 4, 8);
  const double base = bmo_norm(log_distance_function(g, Point{}), fam).value;
  for (double lambda : {0.25, 4.0}) {
    const double floor = g.spacing() / 2.0;
    const auto f = SampledFunction::from_function(g, [&](const Point& x) {
      return std::log(std::max(lambda * g.periodic_distance(x, Point{}), floor));
    });
    CHECK(bmo_norm(f, fam).value == doctest::Approx(base).epsilon(0.05));
  }
}

TEST_CASE("blo norm: witness-ball comparison and the classical -log example") {
  const Grid g(1, 1024, 8.0);
  const auto fam = BallFamily::dense(g, 4, 2);
  const auto f = log_distance_function(g, Point{}, -1.0);  // -log|x|, classical BLO

  const auto blo = blo_norm(f, fam);
  CHECK(std::isfinite(blo.value));
  CHECK(blo.value > 0.0);

  // on the BMO witness ball, mean excess dominates mean deviation about f_B
  const auto bmo = bmo_norm(f, fam);
  CHECK(ball_mean_excess(f, bmo.witness) >=
        ball_mean_abs_deviation(f, bmo.witness) * (1.0 - 1e-12));

  // ladder refinement: denser radii never decrease the supremum
  const auto fam_dense = BallFamily::dense(g, 8, 2);
  CHECK(blo_norm(f, fam_dense).value >= blo.value * (1.0 - 1e-12));

  // BLO subset BMO with factor 2
  CHECK(bmo.value <= 2.0 * blo.value * (1.0 + 1e-12));
}

TEST_CASE("lp norms: closed forms, homogeneity, guards") {
  const Grid g(1, 2048, 10.0);
  const auto one = SampledFunction::from_function(g, [](const Point&) { return 1.0; });
  for (double p : {1.0, 2.0, 4.0})
    CHECK(lp_norm(one, p) == doctest::Approx(std::pow(20.0, 1.0 / p)).epsilon(1e-12));
  CHECK(lp_norm(one, kInfExponent) == 1.0);

  const Grid g2(2, 32, 3.0);
  const auto one2 = SampledFunction::from_function(g2, [](const Point&) { return 1.0; });
  CHECK(lp_norm(one2, 2.0) == doctest::Approx(6.0).epsilon(1e-12));

  // ||N(0,1) density||_2 = pi^(-1/4) / sqrt(2) against quadrature
  const Grid gl(1, 4096, 20.0);
  const auto gauss = SampledFunction::from_function(gl, [](const Point& x) {
    return std::exp(-0.5 * x[0] * x[0]) / std::sqrt(2.0 * std::numbers::pi);
  });
  const double closed = std::pow(std::numbers::pi, -0.25) / std::sqrt(2.0);
  CHECK(lp_norm(gauss, 2.0) == doctest::Approx(closed).epsilon(1e-9));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist(0.0, 1.0);
  SampledFunction f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = dist(rng);
  SampledFunction fs(g);
  for (std::size_t i = 0; i < g.size(); ++i) fs[i] = -1.7 * f[i];
  for (double p : {1.0, 2.0, 3.0, kInfExponent})
    CHECK(lp_norm(fs, p) == doctest::Approx(1.7 * lp_norm(f, p)).epsilon(1e-12));

  CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("bmo structure lemma: constants skipped, log constants finite") {
  const Grid g(1, 1024, 8.0);
  const auto fam = BallFamily::dense(g, 4, 2);

  const auto c = SampledFunction::from_function(g, [](const Point&) { return 5.0; });
  CHECK(check_bmo_lemma(c, fam).skipped);

  const auto f = log_distance_function(g, Point{});
  const auto rep = check_bmo_lemma(f, fam, 3);
  CHECK(!rep.skipped);
  CHECK(rep.balls_tested > 0);
  CHECK(rep.jensen_violations == 0);
  CHECK(std::isfinite(rep.dilate_mean_constant));
  CHECK(std::isfinite(rep.l2_oscillation_constant));
  CHECK(std::isfinite(rep.dilate_deviation_constant));
  CHECK(rep.dilate_mean_constant > 0.0);
  CHECK(rep.l2_oscillation_constant >= 1.0 - 1e-12);  // L2 mean osc >= L1 mean osc

  // random smooth input: Jensen direction holds ball by ball
  const auto trig = random_trig_polynomial(g, 8, 99);
  const auto rep2 = check_bmo_lemma(trig, fam, 2);
  CHECK(rep2.jensen_violations == 0);
}

TEST_CASE("bmo-to-blo ratio report") {
  const Grid g(1, 512, 10.0);
  const auto fam = BallFamily::dense(g, 4, 2);
  const auto k = make_kernel("gaussian", 1);
  const auto f = log_distance_function(g, Point{});
  const auto field = build_field(f, *k, TimeGrid::dyadic(6, 4, 1.0));
  const auto osc = oscillation_field(field);

  const auto rep = bmo_blo_ratio(osc, f, fam);
  CHECK(!rep.skipped);
  CHECK(std::isfinite(rep.ratio));
  CHECK(rep.ratio > 0.0);
  CHECK(rep.operator_blo == doctest::Approx(rep.ratio * rep.input_bmo).epsilon(1e-12));

  // constant input short-circuits to skipped
  const auto c = SampledFunction::from_function(g, [](const Point&) { return 1.0; });
  const auto cfield = build_field(c, *k, TimeGrid::dyadic(6, 4, 1.0));
  const auto crep = bmo_blo_ratio(oscillation_field(cfield), c, fam);
  CHECK(crep.skipped);
}

TEST_CASE("ball family construction") {
  const Grid g(1, 256, 8.0);
  const auto fam = BallFamily::dense(g, 4);
  CHECK(!fam.radii.empty());
  CHECK(fam.radii.front() == doctest::Approx(2.0 * g.spacing()));
  CHECK(fam.radii.back() == doctest::Approx(4.0));
  for (std::size_t i = 1; i < fam.radii.size(); ++i)
    CHECK(fam.radii[i] > fam.radii[i - 1]);
  CHECK(fam.center_count(g) == 256);
  CHECK_THROWS_AS(radius_ladder(g, 1.0, 0.5, 4), std::invalid_argument);
}
