#include <gtest/gtest.h>

#include <cmath>

#include "npbayes/error.hpp"
#include "npbayes/quantile.hpp"
#include "oracles.hpp"

using namespace npbayes;

TEST(SortedSample, SortsAndRejectsTies) {
  const auto s = SortedSample::from_values({3.0, -1.0, 2.0});
  EXPECT_EQ(s.front(), -1.0);
  EXPECT_EQ(s.back(), 3.0);
  EXPECT_THROW(SortedSample::from_values({1.0, 2.0, 1.0}), Error);
  EXPECT_THROW(SortedSample::from_values({}), Error);
}

TEST(PriorQuantileCdf, MedianSymmetryAndMonotone) {
  const auto f0 = BaseDistribution::normal(2.0, 1.5);
  for (double b : {0.1, 1.0, 30.0}) EXPECT_NEAR(prior_quantile_cdf(0.5, 2.0, b, f0), 0.5, 1e-13);
  double prev = 0.0;
  for (double x = -4.0; x <= 8.0; x += 0.1) {
    const double c = prior_quantile_cdf(0.3, x, 2.0, f0);
    ASSERT_GE(c, prev);
    prev = c;
  }
}

TEST(PriorQuantileCdf, FactorizesThroughUniformBase) {
  const auto f0 = BaseDistribution::normal(0.0, 1.0);
  const auto unif = BaseDistribution::uniform(0.0, 1.0);
  for (double y : {0.1, 0.5, 0.8})
    for (double x : {-2.0, -0.3, 0.0, 1.1})
      for (double b : {0.5, 4.0}) EXPECT_NEAR(prior_quantile_cdf(y, x, b, f0), prior_quantile_cdf(y, f0.cdf(x), b, unif), 1e-12);
}

TEST(PriorQuantileCdf, ConcentratesForLargeB) {
  const auto f0 = BaseDistribution::uniform(0.0, 1.0);
  for (double x : {0.2, 0.29, 0.31, 0.6}) {
    const double step = x >= 0.3 ? 1.0 : 0.0;
    EXPECT_NEAR(prior_quantile_cdf(0.3, x, 1e6, f0), step, 1e-3);
  }
  // against an independent Beta cdf: 1 - G(y; b F0, b (1-F0))
  EXPECT_NEAR(prior_quantile_cdf(0.3, 0.4, 5.0, f0), 1.0 - oracle::beta_cdf(0.3, 2.0, 3.0), 1e-12);
  EXPECT_EQ(prior_quantile_cdf(0.3, -1.0, 5.0, f0), 0.0);
  EXPECT_EQ(prior_quantile_cdf(0.3, 2.0, 5.0, f0), 1.0);
}

TEST(PosteriorQuantileLaw, MassConservation) {
  const auto f0 = BaseDistribution::normal(0.0, 2.0);
  for (double b : {0.0, 0.5, 5.0})
    for (std::size_t n : {1u, 5u, 50u}) {
      std::vector<double> xs(n);
      for (std::size_t i = 0; i < n; ++i) xs[i] = std::cos(0.7 * i) + 0.01 * i;
      const auto law = posterior_quantile_law(0.4, SortedSample::from_values(xs), b, f0);
      double atoms = 0.0;
      for (const auto& a : law.atoms()) atoms += a.mass;
      EXPECT_NEAR(atoms + law.continuous_mass(), 1.0, 1e-10) << b << " " << n;
      EXPECT_NEAR(law.cdf(1e6), 1.0, 1e-10);
      EXPECT_NEAR(law.cdf(-1e6), 0.0, 1e-10);
    }
}

TEST(PosteriorQuantileLaw, SegmentCdfFormula) {
  // inside window i: 1 - G(y; b F0(x) + i, b (1-F0(x)) + n - i)
  const auto f0 = BaseDistribution::uniform(0.0, 1.0);
  const auto data = SortedSample::from_values({0.1, 0.35, 0.6, 0.9});
  const double b = 2.0, y = 0.45;
  const auto law = posterior_quantile_law(y, data, b, f0);
  const double x = 0.5;  // window between x_(2) and x_(3), i = 2
  EXPECT_NEAR(law.cdf(x), 1.0 - oracle::beta_cdf(y, b * x + 2, b * (1 - x) + 2), 1e-12);
}

TEST(PosteriorQuantileLaw, NoninformativeLimit) {
  const auto f0 = BaseDistribution::normal(0.0, 1.0);
  const auto data = SortedSample::from_values({0.0, 1.0});
  const auto law = posterior_quantile_law(0.5, data, 0.0, f0);
  ASSERT_EQ(law.atoms().size(), 2u);
  EXPECT_NEAR(law.atoms()[0].mass, 0.5, 1e-15);
  EXPECT_NEAR(law.atoms()[1].mass, 0.5, 1e-15);
  const auto tiny = posterior_quantile_law(0.3, SortedSample::from_values({-1.0, 0.2, 0.5, 2.0}), 1e-8, f0);
  EXPECT_LT(tiny.continuous_mass(), 1e-6);
}

TEST(NoninfPointMasses, ExamplesAndSum) {
  const auto p = noninf_point_masses(0.5, 3);
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
  EXPECT_NEAR(p[2], 0.25, 1e-15);
  EXPECT_EQ(noninf_point_masses(0.7, 1)[0], 1.0);
  for (std::size_t n : {2u, 17u, 200u}) {
    double s = 0.0;
    for (double v : noninf_point_masses(0.37, n)) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(BernsteinQuantile, EndpointsAndDotProduct) {
  const auto data = SortedSample::from_values({0.0, 1.0});
  EXPECT_NEAR(bernstein_quantile(0.5, data), 0.5, 1e-15);
  const auto d5 = SortedSample::from_values({-2.0, 0.5, 0.7, 3.0, 10.0});
  EXPECT_NEAR(bernstein_quantile(1e-12, d5), -2.0, 1e-9);
  EXPECT_NEAR(bernstein_quantile(1 - 1e-12, d5), 10.0, 1e-9);
  for (double y = 0.05; y < 1.0; y += 0.05) {
    const auto p = noninf_point_masses(y, 5);
    double dot = 0.0;
    for (std::size_t i = 0; i < 5; ++i) dot += p[i] * d5[i];
    EXPECT_NEAR(bernstein_quantile(y, d5), dot, 1e-12);
  }
}

TEST(BernsteinQuantile, DerivativeMatchesFiniteDifference) {
  const auto d = SortedSample::from_values({0.1, 0.4, 1.3, 1.5, 2.8, 3.3, 5.0});
  for (double y = 0.05; y < 0.96; y += 0.05) {
    const double e = 1e-5;
    const double fd = (bernstein_quantile(y + e, d) - bernstein_quantile(y - e, d)) / (2 * e);
    EXPECT_NEAR(bernstein_quantile_derivative(y, d), fd, 1e-6);
  }
}

TEST(QuantilePosteriorMean, SmallBMatchesBernstein) {
  const auto f0 = BaseDistribution::normal(0.0, 1.0);
  const auto d = SortedSample::from_values({-0.8, -0.1, 0.3, 0.9, 1.6});
  double prev = -1e300;
  for (double y = 0.1; y < 0.95; y += 0.1) {
    const double m = quantile_posterior_mean(y, d, 1e-8, f0);
    EXPECT_NEAR(m, bernstein_quantile(y, d), 1e-4);
    const double mb = quantile_posterior_mean(y, d, 2.0, f0);
    ASSERT_GE(mb, prev);
    prev = mb;
  }
}

TEST(QuantilePosteriorMean, PriorMeanFromCdf) {
  // E Q(y) = int (1 - H) - int H over the real line, by quadrature on the prior cdf
  const auto f0 = BaseDistribution::uniform(0.0, 1.0);
  const double y = 0.3, b = 3.0;
  const double ref = oracle::simpson([&](double x) { return 1.0 - prior_quantile_cdf(y, x, b, f0); }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(prior_quantile_mean(y, b, f0), ref, 1e-8);
}

TEST(AutomaticDensity, BoundaryValuesAndSupport) {
  const auto f = automatic_density(SortedSample::from_values({0.0, 1.0, 3.0}));
  EXPECT_DOUBLE_EQ(f(0.0), 0.5);
  EXPECT_DOUBLE_EQ(f(3.0), 0.25);
  EXPECT_EQ(f(-0.01), 0.0);
  EXPECT_EQ(f(3.01), 0.0);
  EXPECT_NEAR(oracle::simpson(f, 0.0, 1.0, 1e-11) + oracle::simpson(f, 1.0, 3.0, 1e-11), 1.0, 1e-6);
  EXPECT_THROW(automatic_density(SortedSample::from_values({0.0, 1.0})), Error);
}

TEST(AutomaticDensity, CdfInvertsBernstein) {
  const auto d = SortedSample::from_values({0.2, 0.5, 1.0, 2.0, 2.2});
  const AutomaticDensity f(d);
  for (double y = 0.05; y < 1.0; y += 0.1) EXPECT_NEAR(f.cdf(bernstein_quantile(y, d)), y, 1e-10);
}
