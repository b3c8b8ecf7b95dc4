#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "npbayes/dp.hpp"
#include "npbayes/error.hpp"
#include "oracles.hpp"

using namespace npbayes;

namespace {

void expect_simplex(const AtomicMeasure& m) {
  double s = m.residual_mass();
  for (double w : m.weights()) {
    ASSERT_GE(w, 0.0);
    s += w;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}

}  // namespace

TEST(BaseDistribution, CdfIsMonotoneWithLimits) {
  const auto fams = {BaseDistribution::uniform(-1.0, 2.0), BaseDistribution::normal(1.0, 3.0),
                     BaseDistribution::empirical({0.5, -2.0, 4.0}),
                     BaseDistribution::mixture(BaseDistribution::normal(0, 1), 2.0, {1.0, 3.0})};
  for (const auto& f : fams) {
    double prev = 0.0;
    for (double x = -50.0; x <= 50.0; x += 0.25) {
      const double c = f.cdf(x);
      ASSERT_GE(c, prev);
      prev = c;
    }
    EXPECT_NEAR(f.cdf(-1e6), 0.0, 1e-12);
    EXPECT_NEAR(f.cdf(1e6), 1.0, 1e-12);
  }
}

TEST(BaseDistribution, SamplingMatchesCdf) {
  const auto fams = {BaseDistribution::uniform(-1.0, 2.0), BaseDistribution::normal(1.0, 3.0)};
  RngState rng(17);
  for (const auto& f : fams) {
    std::vector<double> xs(20000);
    for (auto& x : xs) x = f.sample(rng);
    EXPECT_LT(oracle::ks_one_sample(xs, [&](double x) { return f.cdf(x); }), 0.015);
  }
  const auto nrm = BaseDistribution::normal(1.0, 3.0);
  for (double x : {-5.0, 0.0, 2.5}) EXPECT_NEAR(nrm.cdf(x), oracle::normal_cdf((x - 1.0) / 3.0), 1e-14);
}

TEST(BaseDistribution, MixtureWeights) {
  const auto comp = BaseDistribution::uniform(0.0, 1.0);
  const auto mix = BaseDistribution::mixture(comp, 1.0, {0.25, 0.75, 2.0});
  // weight b/(b+n) = 1/4 on the continuous part
  EXPECT_DOUBLE_EQ(mix.component_weight(), 0.25);
  EXPECT_NEAR(mix.cdf(0.5), 0.25 * 0.5 + 0.75 * (1.0 / 3.0), 1e-15);
  EXPECT_NEAR(mix.cdf(2.0), 1.0, 1e-15);
  EXPECT_NEAR(mix.mean(), 0.25 * 0.5 + 0.75 * 1.0, 1e-15);
}

TEST(BaseDistribution, RejectsBadParameters) {
  EXPECT_THROW(BaseDistribution::uniform(1.0, 1.0), Error);
  EXPECT_THROW(BaseDistribution::normal(0.0, 0.0), Error);
  EXPECT_THROW(BaseDistribution::empirical({}), Error);
}

TEST(FiniteApprox, SingleAtom) {
  RngState rng(1);
  const auto m = finite_approx_sample(1, DPParams(3.0, BaseDistribution::normal(0, 1)), rng);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.weights()[0], 1.0);
  EXPECT_EQ(m.residual_mass(), 0.0);
}

TEST(FiniteApprox, SetMassMeanAndSimplex) {
  RngState root(2);
  const DPParams params(1.0, BaseDistribution::normal(0, 1));
  std::vector<double> pa(3000);
  for (std::size_t r = 0; r < pa.size(); ++r) {
    auto rng = root.split(r);
    const auto m = finite_approx_sample(500, params, rng);
    if (r < 20) expect_simplex(m);
    pa[r] = m.mass_at_or_below(0.0);
  }
  EXPECT_NEAR(oracle::mean(pa), 0.5, 3 * oracle::std_error(pa));
  RngState rng(0);
  EXPECT_THROW(finite_approx_sample(0, params, rng), Error);
}

TEST(FiniteApprox, ThreeSetPartitionMarginals) {
  // P0 masses (0.2, 0.3, 0.5) from U(0,1) cut at 0.2 and 0.5, b = 2
  RngState root(3);
  const DPParams params(2.0, BaseDistribution::uniform(0.0, 1.0));
  std::vector<std::vector<double>> cols(3, std::vector<double>(5000));
  for (std::size_t r = 0; r < 5000; ++r) {
    auto rng = root.split(r);
    const auto m = finite_approx_sample(2000, params, rng);
    cols[0][r] = m.mass_at_or_below(0.2);
    cols[1][r] = m.mass_in(0.2, 0.5);
    cols[2][r] = 1.0 - cols[0][r] - cols[1][r];
  }
  const double alpha[] = {0.4, 0.6, 1.0};
  for (int k = 0; k < 3; ++k) {
    const double d = oracle::ks_one_sample(cols[k], [&](double x) { return oracle::beta_cdf(x, alpha[k], 2.0 - alpha[k]); });
    EXPECT_LT(d, 0.03) << k;
  }
}

TEST(StickBreaking, FirstWeightMeanAndTruncation) {
  RngState root(4);
  const double b = 3.0;
  const DPParams params(b, BaseDistribution::uniform(0, 1));
  std::vector<double> g1(10000);
  for (std::size_t r = 0; r < g1.size(); ++r) {
    auto rng = root.split(r);
    const auto m = stick_breaking_sample(params, 1e-6, rng);
    ASSERT_LE(m.residual_mass(), 1e-6);
    if (r < 20) expect_simplex(m);
    g1[r] = m.weights()[0];
  }
  EXPECT_NEAR(oracle::mean(g1), 1.0 / (1.0 + b), 3 * oracle::std_error(g1));
  RngState rng(0);
  EXPECT_THROW(stick_breaking_sample(params, 0.0, rng), Error);
  EXPECT_THROW(stick_breaking_sample(params, 1.0, rng), Error);
}

TEST(StickBreaking, GeneralStickLaw) {
  // first stick is Beta(a, b') directly
  RngState root(5);
  const DPParams params(1.0, BaseDistribution::uniform(0, 1), StickLaw{2.0, 5.0});
  EXPECT_FALSE(params.is_dirichlet());
  std::vector<double> g1(5000);
  for (std::size_t r = 0; r < g1.size(); ++r) {
    auto rng = root.split(r);
    g1[r] = stick_breaking_sample(params, 1e-8, rng).weights()[0];
  }
  EXPECT_LT(oracle::ks_one_sample(g1, [](double x) { return oracle::beta_cdf(x, 2.0, 5.0); }), 0.025);
}

TEST(RandomM, DegenerateReductions) {
  const DPParams params(1.0, BaseDistribution::normal(0, 1));
  RngState rng(6);
  const auto one = random_m_sample(CountLaw::degenerate(1), params, rng);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_EQ(one.weights()[0], 1.0);

  RngState root(7);
  std::vector<double> a(5000), b(5000);
  for (std::size_t r = 0; r < a.size(); ++r) {
    auto r1 = root.split(2 * r);
    auto r2 = root.split(2 * r + 1);
    a[r] = random_m_sample(CountLaw::degenerate(40), params, r1).mass_at_or_below(0.0);
    b[r] = finite_approx_sample(40, params, r2).mass_at_or_below(0.0);
  }
  EXPECT_LT(oracle::ks_two_sample(a, b), 0.03);
}

TEST(RandomM, ApproachesDirichletAsMeanGrows) {
  const DPParams params(1.0, BaseDistribution::normal(0, 1));
  const auto arcsine = [](double x) {
    return x <= 0 ? 0.0 : x >= 1 ? 1.0 : 2.0 / M_PI * std::asin(std::sqrt(x));
  };
  std::vector<double> ks;
  for (double mean : {5.0, 50.0, 500.0}) {
    RngState root(8);
    std::vector<double> pa(20000);
    for (std::size_t r = 0; r < pa.size(); ++r) {
      auto rng = root.split(r);
      pa[r] = random_m_sample(CountLaw::one_plus_poisson(mean), params, rng).mass_at_or_below(0.0);
    }
    ks.push_back(oracle::ks_one_sample(pa, arcsine));
  }
  EXPECT_GT(ks[0], ks[1]);
  EXPECT_GT(ks[1], ks[2]);
}

TEST(PosteriorUpdate, EmptyDataLeavesParams) {
  const DPParams p(2.0, BaseDistribution::normal(0, 1));
  EXPECT_TRUE(posterior_update(p, {}) == p);
}

TEST(PosteriorUpdate, ComposesOverDataSplits) {
  const DPParams p(2.0, BaseDistribution::normal(0, 1));
  const std::vector<double> d1 = {0.1, -1.0, 2.0}, d2 = {0.4, 3.0};
  std::vector<double> all = d1;
  all.insert(all.end(), d2.begin(), d2.end());
  const auto twice = posterior_update(posterior_update(p, d1), d2);
  const auto once = posterior_update(p, all);
  EXPECT_TRUE(twice == once);
  EXPECT_EQ(once.concentration(), 7.0);
}

TEST(PosteriorUpdate, RejectsGeneralSticks) {
  const DPParams p(1.0, BaseDistribution::normal(0, 1), StickLaw{2.0, 1.0});
  EXPECT_THROW(posterior_update(p, {0.0}), Error);
}

TEST(PosteriorUpdate, SetMassIsBeta) {
  const double b = 2.0;
  const std::vector<double> data = {-1.2, -0.3, 0.1, 0.4, 0.8, 1.5, 2.2, -0.7, 0.05, 3.0};
  const auto post = posterior_update(DPParams(b, BaseDistribution::normal(0, 1)), data);
  const double below = static_cast<double>(std::count_if(data.begin(), data.end(), [](double x) { return x <= 0; }));
  const double n = static_cast<double>(data.size());
  RngState root(9);
  std::vector<double> pa(5000);
  for (std::size_t r = 0; r < pa.size(); ++r) {
    auto rng = root.split(r);
    pa[r] = stick_breaking_sample(post, 1e-10, rng).mass_at_or_below(0.0);
  }
  const double d = oracle::ks_one_sample(pa, [&](double x) { return oracle::beta_cdf(x, b * 0.5 + below, b * 0.5 + n - below); });
  EXPECT_LT(d, 0.03);
}

TEST(PosteriorUpdate, NoninformativeLimitIsFlatDirichletOnData) {
  const std::vector<double> data = {0.3, 1.7, 2.9, 4.1};
  const auto post = posterior_update(DPParams(kSmallConcentration, BaseDistribution::normal(0, 10)), data);
  RngState root(10);
  std::vector<double> w1(5000);
  for (std::size_t r = 0; r < w1.size(); ++r) {
    auto rng = root.split(r);
    const auto m = stick_breaking_sample(post, 1e-12, rng);
    double on_data = 0.0, first = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      const bool hit = std::find(data.begin(), data.end(), m.atoms()[j]) != data.end();
      if (hit) on_data += m.weights()[j];
      if (m.atoms()[j] == data[0]) first += m.weights()[j];
    }
    ASSERT_GE(on_data, 1.0 - 1e-6);
    w1[r] = first;
  }
  // one coordinate of a flat Dirichlet(1,1,1,1) is Beta(1,3)
  EXPECT_LT(oracle::ks_one_sample(w1, [](double x) { return oracle::beta_cdf(x, 1.0, 3.0); }), 0.03);
}

TEST(SetProbabilityLaw, VarianceFormulaAndLimits) {
  const auto base = BaseDistribution::normal(0, 1);
  const auto l = set_probability_law(DPParams(1.0, base), 0.5);
  EXPECT_DOUBLE_EQ(l.variance, 0.125);
  EXPECT_DOUBLE_EQ(l.mean, 0.5);
  ASSERT_TRUE(l.law.has_value());
  EXPECT_DOUBLE_EQ(l.law->alpha, 0.5);

  const auto z = set_probability_law(DPParams(1.0, base), 0.0);
  EXPECT_TRUE(z.degenerate);
  EXPECT_EQ(z.point_mass, 0.0);
  EXPECT_FALSE(z.law.has_value());

  const auto big = set_probability_law(DPParams(1e6, base), 0.3);
  EXPECT_LT(big.variance, 1e-6);
  EXPECT_THROW(set_probability_law(DPParams(1.0, base), 1.5), Error);
}
