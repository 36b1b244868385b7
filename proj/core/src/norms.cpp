#include "varops/norms.hpp"

#include <algorithm>
#include <cmath>

#include "varops/parallel.hpp"

namespace varops {

BallFamily BallFamily::dense(const Grid& grid, int per_octave, std::size_t center_stride) {
  BallFamily fam;
  fam.center_stride = std::max<std::size_t>(1, center_stride);
  fam.radii = radius_ladder(grid, 2.0 * grid.spacing(), grid.half_width() / 2.0, per_octave);
  return fam;
}

std::size_t BallFamily::center_count(const Grid& grid) const {
  return (grid.size() + center_stride - 1) / center_stride;
}

double ball_mean_abs_deviation(const SampledFunction& f, const Ball& ball) {
  const BallMoments m = ball_moments(f, ball);
  const double mean = m.sum / static_cast<double>(m.count);
  double dev = 0.0;
  for_each_ball_point(f.grid(), ball, [&](std::size_t i) { dev += std::abs(f[i] - mean); });
  return dev / static_cast<double>(m.count);
}

double ball_mean_excess(const SampledFunction& f, const Ball& ball) {
  const BallMoments m = ball_moments(f, ball);
  return m.sum / static_cast<double>(m.count) - m.min;
}

namespace {

struct BestBall {
  double value = -1.0;
  Ball ball{};
};

// Max of a per-ball statistic over the family; per-center maxima are computed
// in parallel, the final reduction is sequential over center index.
template <class Stat>
NormReport family_sup(const SampledFunction& f, const BallFamily& family, Stat&& stat) {
  if (family.radii.empty()) throw std::invalid_argument("ball family has no radii");
  const Grid& g = f.grid();
  const std::size_t centers = family.center_count(g);
  std::vector<BestBall> best(centers);
  parallel_for(centers, [&](std::size_t c) {
    const Point center = g.coord(c * family.center_stride);
    BestBall local;
    for (double r : family.radii) {
      const Ball b{center, r};
      const double v = stat(b);
      if (v > local.value) local = {v, b};
    }
    best[c] = local;
  });
  NormReport rep;
  rep.centers = centers;
  rep.radii = family.radii.size();
  rep.value = 0.0;
  for (const auto& b : best)
    if (b.value > rep.value) {
      rep.value = b.value;
      rep.witness = b.ball;
    }
  return rep;
}

}  // namespace

NormReport bmo_norm(const SampledFunction& f, const BallFamily& family) {
  return family_sup(f, family, [&](const Ball& b) {
    const BallMoments m = ball_moments(f, b);
    const double mean = m.sum / static_cast<double>(m.count);
    double dev = 0.0;
    for_each_ball_point(f.grid(), b, [&](std::size_t i) { dev += std::abs(f[i] - mean); });
    return dev / static_cast<double>(m.count);
  });
}

NormReport blo_norm(const SampledFunction& f, const BallFamily& family) {
  return family_sup(f, family, [&](const Ball& b) {
    const BallMoments m = ball_moments(f, b);
    return m.sum / static_cast<double>(m.count) - m.min;
  });
}

double lp_norm(const SampledFunction& f, double p) {
  if (std::isinf(p)) {
    double sup = 0.0;
    for (double v : f.values()) sup = std::max(sup, std::abs(v));
    return sup;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("lp exponent must be >= 1 or infinity");
  std::vector<double> powed(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) powed[i] = std::pow(std::abs(f[i]), p);
  return std::pow(f.grid().cell_volume() * kahan_sum(powed), 1.0 / p);
}

BmoLemmaReport check_bmo_lemma(const SampledFunction& f, const BallFamily& family,
                               int max_m) {
  BmoLemmaReport rep;
  rep.max_m = max_m;
  rep.bmo = bmo_norm(f, family).value;
  if (rep.bmo <= 0.0) {
    rep.skipped = true;
    return rep;
  }
  const Grid& g = f.grid();
  const double r_cap = g.half_width() / 2.0;
  for (double r : family.radii) {
    // dyadic dilates must stay within the family's radius cap
    if (r * std::pow(2.0, max_m) > r_cap) continue;
    for (std::size_t c = 0; c < g.size(); c += family.center_stride * 8) {
      const Ball base{g.coord(c), r};
      const BallMoments bm = ball_moments(f, base);
      const double mean_b = bm.sum / static_cast<double>(bm.count);

      double l1 = 0.0;
      double l2 = 0.0;
      for_each_ball_point(g, base, [&](std::size_t i) {
        const double d = std::abs(f[i] - mean_b);
        l1 += d;
        l2 += d * d;
      });
      l1 /= static_cast<double>(bm.count);
      l2 = std::sqrt(l2 / static_cast<double>(bm.count));
      if (l1 > l2 * (1.0 + 1e-12)) ++rep.jensen_violations;
      rep.l2_oscillation_constant = std::max(rep.l2_oscillation_constant, l2 / rep.bmo);

      for (int m = 1; m <= max_m; ++m) {
        const Ball dilated{base.center, r * std::pow(2.0, m)};
        const BallMoments dm = ball_moments(f, dilated);
        const double mean_d = dm.sum / static_cast<double>(dm.count);
        rep.dilate_mean_constant =
            std::max(rep.dilate_mean_constant, std::abs(mean_b - mean_d) / (m * rep.bmo));
        double dev = 0.0;
        for_each_ball_point(g, dilated,
                            [&](std::size_t i) { dev += std::abs(f[i] - mean_b); });
        dev /= static_cast<double>(dm.count);
        rep.dilate_deviation_constant =
            std::max(rep.dilate_deviation_constant, dev / (m * rep.bmo));
      }
      ++rep.balls_tested;
    }
  }
  return rep;
}

RatioReport bmo_blo_ratio(const OperatorField& op, const SampledFunction& input,
                          const BallFamily& family) {
  RatioReport rep;
  rep.input_bmo = bmo_norm(input, family).value;
  if (rep.input_bmo <= 0.0) {
    rep.skipped = true;
    return rep;
  }
  const NormReport blo = blo_norm(op.values, family);
  rep.operator_blo = blo.value;
  rep.blo_witness = blo.witness;
  rep.ratio = rep.operator_blo / rep.input_bmo;
  return rep;
}

}  // namespace varops
