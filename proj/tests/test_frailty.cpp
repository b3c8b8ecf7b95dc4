#include <gtest/gtest.h>

#include <cmath>

#include "npbayes/error.hpp"
#include "npbayes/frailty.hpp"
#include "oracles.hpp"

using namespace npbayes;

TEST(JumpLaw, LaplaceTransforms) {
  EXPECT_NEAR(JumpLaw::gamma(1.0).laplace(1.0), 0.5, 1e-15);
  EXPECT_NEAR(JumpLaw::gamma(2.5).laplace(0.7), std::pow(1.7, -2.5), 1e-15);
  EXPECT_NEAR(JumpLaw::point_mass(0.3).laplace(2.0), std::exp(-0.6), 1e-15);
  // beta_risk: G = -log(1-R), R ~ Beta(a,b), so E e^{-uG} = E (1-R)^u
  const auto br = JumpLaw::beta_risk(2.0, 3.0);
  const double ref = oracle::simpson([](double r) { return std::pow(1 - r, 1.5) * 12.0 * r * (1 - r) * (1 - r); }, 0.0, 1.0, 1e-13);
  EXPECT_NEAR(br.laplace(1.5), ref, 1e-10);
  EXPECT_THROW(JumpLaw::gamma(0.0), Error);
}

TEST(JumpLaw, SamplingMatchesLaplace) {
  RngState rng(1);
  for (const auto& law : {JumpLaw::gamma(0.6), JumpLaw::beta_risk(1.5, 2.0)}) {
    std::vector<double> v(50000);
    for (auto& x : v) x = std::exp(-law.sample(rng));
    EXPECT_NEAR(oracle::mean(v), law.laplace(1.0), 3 * oracle::std_error(v));
  }
}

TEST(SimulatePath, PathProperties) {
  FrailtySpec spec;
  RngState root(2);
  std::vector<double> count(10000);
  for (std::size_t r = 0; r < count.size(); ++r) {
    auto rng = root.split(r);
    const auto p = simulate_path(spec, 2.0, rng);
    ASSERT_EQ(p.damage_at(0.0), 0.0);
    double prev = 0.0;
    for (double t = 0.0; t <= 2.0; t += 0.1) {
      ASSERT_GE(p.damage_at(t), prev);
      prev = p.damage_at(t);
    }
    count[r] = static_cast<double>(p.jumps_by(2.0));
  }
  EXPECT_NEAR(oracle::mean(count), 2.0, 3 * oracle::std_error(count));
}

TEST(SimulatePath, PowerRateCounts) {
  // Lambda(t) = 0.5 t^2, so the count by t = 3 has mean 4.5
  FrailtySpec spec;
  spec.rate = CumulativeRate::power(0.5, 2.0);
  RngState root(3);
  std::vector<double> count(10000);
  for (std::size_t r = 0; r < count.size(); ++r) {
    auto rng = root.split(r);
    count[r] = static_cast<double>(simulate_path(spec, 3.0, rng).jumps_by(3.0));
  }
  EXPECT_NEAR(oracle::mean(count), 4.5, 3 * oracle::std_error(count));
}

TEST(SimulatePath, ZeroThetaMeansNoDamage) {
  FrailtySpec spec;
  spec.theta = 0.0;
  RngState rng(4);
  const auto p = simulate_path(spec, 5.0, rng);
  EXPECT_EQ(p.damage_at(5.0), 0.0);
  EXPECT_EQ(p.conditional_survival(5.0), 1.0);
}

TEST(MarginalSurvival, ClosedFormAndMonteCarlo) {
  FrailtySpec spec;
  EXPECT_NEAR(marginal_survival(spec, 2.0), std::exp(-1.0), 1e-15);
  FrailtySpec zero = spec;
  zero.theta = 0.0;
  EXPECT_EQ(marginal_survival(zero, 3.0), 1.0);

  // product form: E prod (1-R_j)^theta with R_j = 1 - e^{-G_j}
  spec.theta = 0.7;
  spec.jump = JumpLaw::gamma(2.0);
  RngState root(5);
  std::vector<double> prod(50000);
  for (std::size_t r = 0; r < prod.size(); ++r) {
    auto rng = root.split(r);
    const auto p = simulate_path(spec, 1.5, rng);
    double v = 1.0;
    for (std::size_t j = 0; j < p.jumps_by(1.5); ++j) {
      const double g = (p.levels[j] - (j ? p.levels[j - 1] : 0.0)) / spec.theta;
      v *= std::pow(std::exp(-g), spec.theta);
    }
    prod[r] = v;
  }
  EXPECT_NEAR(oracle::mean(prod), marginal_survival(spec, 1.5), 3 * oracle::std_error(prod));
}

TEST(HazardRate, ExamplesAndLimits) {
  FrailtySpec spec;
  for (double s : {0.0, 1.0, 7.0}) EXPECT_NEAR(hazard_rate(spec, s), 0.5, 1e-15);
  spec.theta = 1e6;
  EXPECT_NEAR(hazard_rate(spec, 1.0), 1.0, 1e-5);
  spec.theta = 0.0;
  EXPECT_EQ(hazard_rate(spec, 2.0), 0.0);
  spec.theta = 0.3;
  const double f = thinning_factor(spec);
  EXPECT_GT(f, 0.0);
  EXPECT_LT(f, 1.0);
}

TEST(HazardRate, IntegratesToSurvival) {
  FrailtySpec spec;
  spec.theta = 1.3;
  spec.jump = JumpLaw::gamma(0.8);
  spec.rate = CumulativeRate::power(0.9, 1.7);
  for (double t : {0.3, 1.0, 2.5}) {
    const double cum = oracle::simpson([&](double s) { return hazard_rate(spec, s); }, 0.0, t, 1e-13);
    EXPECT_NEAR(std::exp(-cum), marginal_survival(spec, t), 1e-8);
  }
}

TEST(MarginalSurvival, ContinuousInTime) {
  FrailtySpec spec;
  for (double t = 0.1; t < 3.0; t += 0.1) EXPECT_LT(std::abs(marginal_survival(spec, t + 1e-8) - marginal_survival(spec, t)), 1e-8);
}

TEST(RegressionHazards, CoxProportional) {
  RegressionSpec rs;
  rs.beta = {0.5, -1.0};
  rs.baseline = CumulativeRate::power(2.0, 1.5);
  const std::vector<std::vector<double>> x = {{1.0, 2.0}, {0.0, 0.5}};
  const auto h = regression_hazards(x, rs);
  const double target = std::exp(0.5 * 1.0 - 1.0 * 1.5);
  for (double s = 0.1; s < 4.0; s += 0.3) EXPECT_NEAR(h[0](s) / h[1](s), target, 1e-15 * target);
}

TEST(RegressionHazards, BetaMultiplier) {
  RegressionSpec rs;
  rs.structure = HazardStructure::beta_multiplier;
  rs.beta = {0.5};
  rs.gamma = {1.0};
  rs.c = 3.0;
  const std::vector<std::vector<double>> x = {{1.0}};
  const auto h = regression_hazards(x, rs);
  const double expect = std::exp(0.5) * std::exp(1.0) / (1.0 + std::exp(1.0));
  EXPECT_NEAR(h[0](0.7), expect, 1e-14);
  RegressionSpec bad = rs;
  bad.gamma = {};
  EXPECT_THROW(regression_hazards(x, bad), Error);
}

TEST(RegressionHazards, IdenticalCovariatesNoEffect) {
  RegressionSpec rs;
  rs.beta = {0.0, 0.0};
  const std::vector<std::vector<double>> x = {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}};
  const auto h = regression_hazards(x, rs);
  for (double s : {0.5, 1.5}) {
    EXPECT_EQ(h[0](s), h[1](s));
    EXPECT_EQ(h[1](s), h[2](s));
  }
  EXPECT_NEAR(h[0].survival(2.0), std::exp(-h[0].cumulative(2.0)), 1e-15);
}
