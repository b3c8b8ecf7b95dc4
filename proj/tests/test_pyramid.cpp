#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "npbayes/error.hpp"
#include "npbayes/pyramid.hpp"
#include "oracles.hpp"

using namespace npbayes;

namespace {

Pyramid equal_spaced(int depth) {
  const std::size_t cells = std::size_t{1} << depth;
  std::vector<double> v(cells - 1);
  for (std::size_t k = 1; k < cells; ++k) v[k - 1] = static_cast<double>(k) / cells;
  return Pyramid(depth, v);
}

}  // namespace

TEST(Pyramid, TreeOrderAndLabels) {
  const auto order = tree_order(3);
  const std::vector<std::size_t> expect = {4, 2, 6, 1, 3, 5, 7};
  EXPECT_EQ(order, expect);
  EXPECT_EQ(node_level(3, 4), 1);
  EXPECT_EQ(node_level(3, 6), 2);
  EXPECT_EQ(node_level(3, 7), 3);
  EXPECT_EQ(node_label(4, 8), "1/2");
  EXPECT_EQ(node_label(4, 12), "3/4");
  EXPECT_EQ(node_label(4, 5), "5/16");
}

TEST(Pyramid, InterpolatedQuantile) {
  const Pyramid p(1, {0.2});
  EXPECT_DOUBLE_EQ(p.quantile(0.25), 0.1);
  EXPECT_DOUBLE_EQ(p.quantile(0.75), 0.6);
  EXPECT_EQ(p.quantile(1.0), 1.0);
  EXPECT_FALSE(Pyramid(2, {0.3, 0.2, 0.9}).is_valid());
  EXPECT_THROW(Pyramid(2, {0.3}), Error);
}

TEST(SamplePrior, MonotoneAndMedianUniform) {
  RngState rng(1);
  std::vector<double> med(10000);
  for (std::size_t r = 0; r < med.size(); ++r) {
    const auto p = sample_prior(4, LevelDensity::uniform(), rng);
    ASSERT_TRUE(p.is_valid());
    ASSERT_LT(p.at(4), p.at(8));
    med[r] = p.at(8);
  }
  EXPECT_NEAR(oracle::mean(med), 0.5, 3 * oracle::std_error(med));
  const auto m1 = [&] {
    RngState r2(2);
    std::vector<double> v(10000);
    for (auto& x : v) x = sample_prior(1, LevelDensity::uniform(), r2).at(1);
    return v;
  }();
  EXPECT_LT(oracle::ks_one_sample(m1, [](double x) { return x; }), 0.02);
}

TEST(SamplePrior, BetaLevelDensityRescaled) {
  // depth 1 median draws from h itself
  RngState rng(3);
  const auto h = LevelDensity::beta(2.0, 5.0);
  std::vector<double> v(10000);
  for (auto& x : v) x = sample_prior(1, h, rng).at(1);
  EXPECT_LT(oracle::ks_one_sample(v, [](double x) { return oracle::beta_cdf(x, 2.0, 5.0); }), 0.02);
  // rescaled density integrates to one on a sub-interval
  const double lo = 0.2, hi = 0.45;
  const double tot = oracle::simpson([&](double x) { return std::exp(h.log_density(x)) / h.mass(lo, hi); }, lo, hi, 1e-12);
  EXPECT_NEAR(tot, 1.0, 1e-9);
}

TEST(PriorLogDensity, UniformClosedForm) {
  // depth 2 uniform: 1 * 1/q2 * 1/(1-q2)
  const Pyramid p(2, {0.1, 0.4, 0.7});
  EXPECT_NEAR(prior_log_density(p, LevelDensity::uniform()), -std::log(0.4) - std::log(0.6), 1e-14);
}

TEST(LoglikInterp, EqualSpacedAndPermutation) {
  const auto p = equal_spaced(4);
  EXPECT_EQ(loglik_interp(p, {}), 0.0);
  std::vector<double> data = {0.01, 0.5, 0.51, 0.99, 0.0, 1.0, 0.3};
  EXPECT_NEAR(loglik_interp(p, data), data.size() * std::log(16.0), 1e-12);
  RngState rng(4);
  const auto q = sample_prior(4, LevelDensity::uniform(), rng);
  const double a = loglik_interp(q, data);
  std::reverse(data.begin(), data.end());
  EXPECT_EQ(loglik_interp(q, data), a);
  EXPECT_THROW(loglik_interp(q, std::vector<double>{1.2}), Error);
}

TEST(CellCounts, LeftClosedCellsLastClosed) {
  const Pyramid p(1, {0.5});
  const std::vector<double> d = {0.0, 0.25, 0.5, 1.0};
  const auto c = cell_counts(p, d);
  EXPECT_EQ(c[0], 2u);
  EXPECT_EQ(c[1], 2u);
}

TEST(LoglikSubstitute, Examples) {
  const auto p = equal_spaced(4);
  EXPECT_EQ(loglik_substitute(p, {}), 0.0);
  const std::vector<double> same_cell = {0.01, 0.02};
  EXPECT_NEAR(std::exp(loglik_substitute(p, same_cell)), 1.0 / 256.0, 1e-15);
}

TEST(LoglikSubstitute, MaximizedByBalancedCounts) {
  // depth 2: four cells at 1/8, 3/8, 5/8, 7/8 placements; enumerate every composition
  const auto p = equal_spaced(2);
  const double mid[] = {0.125, 0.375, 0.625, 0.875};
  for (int n = 1; n <= 8; ++n) {
    double best = -1e300;
    int best_spread = 99;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b)
        for (int c = 0; a + b + c <= n; ++c) {
          const int d = n - a - b - c;
          std::vector<double> data;
          const int cnt[] = {a, b, c, d};
          for (int j = 0; j < 4; ++j) data.insert(data.end(), cnt[j], mid[j]);
          const double l = loglik_substitute(p, data);
          const int spread = std::max({a, b, c, d}) - std::min({a, b, c, d});
          if (l > best + 1e-12) {
            best = l;
            best_spread = spread;
          } else if (std::abs(l - best) <= 1e-12) {
            best_spread = std::min(best_spread, spread);
          }
        }
    EXPECT_LE(best_spread, 1) << n;
  }
}

TEST(PosteriorSampler, ValidDeterministicChain) {
  std::vector<double> data(50);
  RngState drng(5);
  for (auto& x : data) x = drng.uniform();
  PyramidSamplerOptions opt;
  opt.iterations = 300;
  opt.burn_in = 100;
  opt.thin = 2;
  RngState a(6), b(6);
  const auto c1 = posterior_sampler(4, LevelDensity::uniform(), data, PyramidLikelihood::interpolation, opt, a);
  const auto c2 = posterior_sampler(4, LevelDensity::uniform(), data, PyramidLikelihood::interpolation, opt, b);
  ASSERT_EQ(c1.draws.size(), 100u);
  EXPECT_EQ(c1.iteration.front(), 102u);
  for (std::size_t i = 0; i < c1.draws.size(); ++i) {
    ASSERT_TRUE(c1.draws[i].is_valid());
    ASSERT_EQ(c1.draws[i].values(), c2.draws[i].values());
    ASSERT_TRUE(std::isfinite(loglik_interp(c1.draws[i], data)));
  }
  EXPECT_GT(c1.acceptance_rate, 0.0);
  EXPECT_LT(c1.acceptance_rate, 1.0);
}

TEST(PosteriorSampler, LikelihoodsAgreeForLargeN) {
  // heuristic check: node posterior means under the two likelihoods
  std::vector<double> data(400);
  RngState drng(7);
  for (auto& x : data) x = drng.uniform();
  PyramidSamplerOptions opt;
  opt.iterations = 3000;
  opt.burn_in = 500;
  opt.proposal_scale = 0.1;
  RngState r1(8), r2(9);
  const auto a = posterior_sampler(4, LevelDensity::uniform(), data, PyramidLikelihood::interpolation, opt, r1);
  const auto b = posterior_sampler(4, LevelDensity::uniform(), data, PyramidLikelihood::substitute, opt, r2);
  for (std::size_t k = 1; k <= 15; ++k) {
    double ma = 0.0, mb = 0.0;
    for (const auto& d : a.draws) ma += d.at(k);
    for (const auto& d : b.draws) mb += d.at(k);
    EXPECT_LT(std::abs(ma / a.draws.size() - mb / b.draws.size()), 0.05) << k;
  }
}

TEST(PosteriorSampler, Validation) {
  RngState rng(1);
  PyramidSamplerOptions opt;
  opt.iterations = 0;
  EXPECT_THROW(posterior_sampler(4, LevelDensity::uniform(), {}, PyramidLikelihood::substitute, opt, rng), Error);
  EXPECT_THROW(sample_prior(0, LevelDensity::uniform(), rng), Error);
}
