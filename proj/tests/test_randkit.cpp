#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "npbayes/error.hpp"
#include "npbayes/randkit.hpp"
#include "oracles.hpp"

using namespace npbayes;

TEST(RngState, SameSeedSameStream) {
  RngState a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngState, SplitIsDeterministicAndDistinct) {
  RngState root(7);
  auto s1 = root.split(1), s1b = root.split(1), s2 = root.split(2);
  EXPECT_EQ(s1.seed(), s1b.seed());
  EXPECT_NE(s1.seed(), s2.seed());
  EXPECT_EQ(s1.next_u64(), s1b.next_u64());
  EXPECT_EQ(s1.seed(), derive_seed(7, 1));
}

TEST(RngState, UniformIsOpenInterval) {
  RngState rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RegIncBeta, MatchesContinuedFraction) {
  for (double a : {0.05, 0.5, 1.0, 2.5, 30.0}) {
    for (double c : {0.1, 1.0, 4.0, 50.0}) {
      for (double x : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.999}) {
        EXPECT_NEAR(reg_inc_beta(x, a, c), oracle::beta_cdf(x, a, c), 1e-12) << a << " " << c << " " << x;
      }
    }
  }
}

TEST(RegIncBeta, ReflectionIdentity) {
  for (double a : {0.3, 1.0, 7.0})
    for (double c : {0.2, 2.0, 11.0})
      for (double x = 0.0; x <= 1.0; x += 0.05)
        EXPECT_NEAR(reg_inc_beta(x, a, c) + reg_inc_beta(1.0 - x, c, a), 1.0, 1e-12);
}

TEST(RegIncBeta, UniformAndEndpoints) {
  EXPECT_DOUBLE_EQ(reg_inc_beta(0.3, 1.0, 1.0), 0.3);
  for (double a : {0.01, 0.5, 3.0, 400.0}) EXPECT_NEAR(reg_inc_beta(0.5, a, a), 0.5, 1e-12);
  // cdf of density 2y on [0, 0.25], by quadrature
  const double q = oracle::simpson([](double y) { return 2.0 * y; }, 0.0, 0.25, 1e-14);
  EXPECT_NEAR(reg_inc_beta(0.25, 2.0, 1.0), q, 1e-12);
  EXPECT_NEAR(q, 0.0625, 1e-14);
  EXPECT_EQ(reg_inc_beta(0.0, 2.0, 3.0), 0.0);
  EXPECT_EQ(reg_inc_beta(1.0, 2.0, 3.0), 1.0);
  EXPECT_THROW(reg_inc_beta(0.5, 0.0, 1.0), Error);
  EXPECT_THROW(reg_inc_beta(1.5, 1.0, 1.0), Error);
}

TEST(LogGamma, KnownValues) {
  EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-15);
  EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-13);
  EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(M_PI), 1e-14);
  EXPECT_THROW(log_gamma(-1.0), Error);
}

TEST(BetaLaw, MeanAndVariance) {
  const BetaLaw law(2.0, 3.0);
  EXPECT_DOUBLE_EQ(law.mean(), 0.4);
  EXPECT_NEAR(law.variance(), 6.0 / (25.0 * 6.0), 1e-15);
  EXPECT_THROW(BetaLaw(0.0, 1.0), Error);
}

TEST(SampleGamma, MomentsForSeveralShapes) {
  for (double shape : {0.01, 0.5, 1.0, 3.0}) {
    RngState rng(11);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = sample_gamma(shape, rng);
    EXPECT_NEAR(oracle::mean(xs), shape, 3 * oracle::std_error(xs)) << shape;
    // variance of a Gamma(shape,1) is shape; mu4 = 3k^2 + 6k sets the spread
    const double rel_sd = std::sqrt((2 * shape * shape + 6 * shape) / xs.size()) / shape;
    EXPECT_NEAR(oracle::central_moment(xs, shape, 2) / shape, 1.0, 4 * rel_sd) << shape;
  }
  RngState a(12), b(12);
  EXPECT_EQ(sample_gamma(0.3, a), sample_gamma(0.3, b));
  EXPECT_THROW(sample_gamma(0.0, a), Error);
}

TEST(SampleGamma, TinyShapeStaysFiniteInLogSpace) {
  RngState rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double lg = sample_log_gamma(1e-4, rng);
    ASSERT_TRUE(std::isfinite(lg));
  }
}

TEST(SampleBeta, KsAgainstCdf) {
  RngState rng(5);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = sample_beta(0.4, 2.0, rng);
  EXPECT_LT(oracle::ks_one_sample(xs, [](double x) { return oracle::beta_cdf(x, 0.4, 2.0); }), 0.015);
}

TEST(SamplePoisson, MeanAndVariance) {
  for (double mean : {0.5, 7.0, 300.0}) {
    RngState rng(9);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = static_cast<double>(sample_poisson(mean, rng));
    EXPECT_NEAR(oracle::mean(xs), mean, 4 * std::sqrt(mean / xs.size()));
    EXPECT_NEAR(oracle::central_moment(xs, mean, 2) / mean, 1.0, 0.03);
  }
}

TEST(SampleDirichlet, OnSimplexDownToTinyShapes) {
  RngState rng(2);
  for (double a : {1e-4, 0.01, 1.0}) {
    std::vector<double> alphas(50, a);
    for (int r = 0; r < 200; ++r) {
      const auto w = sample_dirichlet(alphas, rng);
      double s = 0.0;
      for (double v : w) {
        ASSERT_FALSE(std::isnan(v));
        ASSERT_GE(v, 0.0);
        s += v;
      }
      ASSERT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(SampleDirichlet, ExchangeableMeans) {
  RngState rng(4);
  const std::vector<double> alphas(4, 0.7);
  std::vector<std::vector<double>> cols(4);
  for (int r = 0; r < 10000; ++r) {
    const auto w = sample_dirichlet(alphas, rng);
    for (int k = 0; k < 4; ++k) cols[k].push_back(w[k]);
  }
  for (const auto& c : cols) EXPECT_NEAR(oracle::mean(c), 0.25, 3 * oracle::std_error(c));
}

TEST(SampleDirichlet, AggregationGivesBetaMarginal) {
  // Dir(b/m,...,b/m) with j coordinates summed is Beta(jb/m, (m-j)b/m)
  const int m = 10, j = 3;
  const double b = 2.0;
  RngState rng(8);
  const std::vector<double> alphas(m, b / m);
  std::vector<double> agg(5000);
  for (auto& v : agg) {
    const auto w = sample_dirichlet(alphas, rng);
    v = w[0] + w[1] + w[2];
  }
  const double d = oracle::ks_one_sample(agg, [&](double x) { return oracle::beta_cdf(x, j * b / m, (m - j) * b / m); });
  EXPECT_LT(d, 0.03);
}

TEST(SampleDirichlet, RejectsBadShapes) {
  RngState rng(1);
  EXPECT_THROW(sample_dirichlet(std::vector<double>{}, rng), Error);
  EXPECT_THROW(sample_dirichlet(std::vector<double>{1.0, 0.0}, rng), Error);
}
