#include <gtest/gtest.h>

#include <cmath>

#include "npbayes/envelope.hpp"
#include "npbayes/error.hpp"
#include "oracles.hpp"

using namespace npbayes;

TEST(StandardizedResiduals, LinearModel) {
  const std::vector<double> y = {3.0, 5.0};
  const std::vector<std::vector<double>> x = {{1.0, 1.0}, {1.0, 2.0}};
  const std::vector<double> beta = {1.0, 1.5};
  const auto r = standardized_residuals(y, x, beta, 0.5);
  EXPECT_DOUBLE_EQ(r[0], (3.0 - 2.5) / 0.5);
  EXPECT_DOUBLE_EQ(r[1], (5.0 - 4.0) / 0.5);
  EXPECT_THROW(standardized_residuals(y, x, beta, 0.0), Error);
}

TEST(PredictiveCdf, NoDataIsBase) {
  const auto g0 = BaseDistribution::normal(0.0, 1.0);
  const std::vector<std::vector<double>> none(3);
  const PredictiveCdf g(none, 1.0, g0);
  EXPECT_EQ(g.n(), 0u);
  for (double t : {-2.0, 0.0, 1.3}) EXPECT_NEAR(g(t), oracle::normal_cdf(t), 1e-14);
}

TEST(PredictiveCdf, EqualWeightWhenBEqualsN) {
  const auto g0 = BaseDistribution::uniform(-1.0, 1.0);
  const std::vector<std::vector<double>> one = {{-0.5, 0.2, 0.9, 1.5}};
  const PredictiveCdf g(one, 4.0, g0);
  EXPECT_DOUBLE_EQ(g.weight(), 0.5);
  EXPECT_NEAR(g(0.5), 0.5 * 0.75 + 0.5 * 0.5, 1e-15);
}

TEST(PredictiveCdf, SmallBIsAveragedEmpirical) {
  const auto g0 = BaseDistribution::normal(0.0, 1.0);
  const std::vector<std::vector<double>> draws = {{0.0, 1.0, 2.0}, {0.5, 1.5, 2.5}};
  const PredictiveCdf g(draws, 1e-9, g0);
  EXPECT_NEAR(g(1.2), (2.0 + 1.0) / 6.0, 1e-8);
  EXPECT_NEAR(g(-3.0), 0.0, 1e-8);
  EXPECT_NEAR(g(9.0), 1.0, 1e-8);
}

TEST(PredictiveCdf, ValidCdfAndOverride) {
  const auto g0 = BaseDistribution::normal(0.0, 2.0);
  RngState rng(3);
  std::vector<std::vector<double>> draws(10, std::vector<double>(25));
  for (auto& d : draws)
    for (auto& r : d) r = sample_normal(rng);
  const PredictiveCdf g(draws, 2.0, g0);
  double prev = 0.0;
  for (double t = -10.0; t <= 10.0; t += 0.05) {
    ASSERT_GE(g(t), prev);
    prev = g(t);
  }
  EXPECT_NEAR(g(-1e9), 0.0, 1e-12);
  EXPECT_NEAR(g(1e9), 1.0, 1e-12);
  const PredictiveCdf fixed(draws, 2.0, g0, 0.3);
  EXPECT_EQ(fixed.weight(), 0.3);
  EXPECT_NEAR(predictive_cdf(0.1, draws, 2.0, g0, 0.3), fixed(0.1), 1e-15);
  const std::vector<std::vector<double>> ragged = {{1.0}, {1.0, 2.0}};
  EXPECT_THROW(PredictiveCdf(ragged, 1.0, g0), Error);
}

TEST(RisingFactorial, Examples) {
  EXPECT_EQ(rising_factorial_log(3.7, 0), 0.0);
  EXPECT_NEAR(rising_factorial_log(2.0, 3), std::log(24.0), 1e-14);
  EXPECT_NEAR(rising_factorial_log(0.3, 1), std::log(0.3), 1e-15);
  // both branches against a direct product
  for (std::size_t m : {10u, 64u, 65u, 500u}) {
    double direct = 0.0;
    for (std::size_t r = 0; r < m; ++r) direct += std::log(1.7 + r);
    EXPECT_NEAR(rising_factorial_log(1.7, m), direct, 1e-10 * std::abs(direct));
  }
  EXPECT_THROW(rising_factorial_log(0.0, 2), Error);
}

TEST(ControlLogFactor, Examples) {
  const std::vector<double> z = {0.2, 0.3, 0.5};
  const std::vector<std::size_t> none = {0, 0, 0};
  EXPECT_EQ(control_log_factor(none, z, 2.0), 0.0);
  const std::vector<std::size_t> n1 = {7};
  const std::vector<double> z1 = {1.0};
  const double b = 1.7;
  EXPECT_NEAR(control_log_factor(n1, z1, b), 7 * std::log(b) - rising_factorial_log(b, 7), 1e-13);
  const std::vector<std::size_t> n2 = {7, 0};
  const std::vector<double> z2 = {0.6, 0.4};
  const std::vector<double> z2a = {0.6, 0.3, 0.1};
  const std::vector<std::size_t> n2a = {7, 0, 0};
  // empty cells contribute nothing
  EXPECT_EQ(control_log_factor(n2, z2, b), control_log_factor(n2a, z2a, b));
  EXPECT_NEAR(control_log_factor(n2, z2, b), 7 * std::log(0.6 * b) - rising_factorial_log(0.6 * b, 7), 1e-13);
  const std::vector<double> zero = {1.0, 0.0};
  EXPECT_THROW(control_log_factor(n2, zero, b), Error);
  EXPECT_THROW(control_log_factor(n1, z2, b), Error);
}

TEST(ControlLogFactor, InvariantUnderRelabeling) {
  const std::vector<std::size_t> n = {3, 8, 1, 5};
  const std::vector<double> z = {0.1, 0.4, 0.2, 0.3};
  const std::vector<std::size_t> np = {5, 1, 3, 8};
  const std::vector<double> zp = {0.3, 0.2, 0.1, 0.4};
  EXPECT_EQ(control_log_factor(n, z, 3.0), control_log_factor(np, zp, 3.0));
}

TEST(ControlPartition, CellsAndCounts) {
  const ControlPartition p({-1.0, 0.0, 2.0});
  EXPECT_EQ(p.cells(), 4u);
  EXPECT_EQ(p.cell_of(-1.0), 0u);
  EXPECT_EQ(p.cell_of(-0.5), 1u);
  EXPECT_EQ(p.cell_of(2.0), 2u);
  EXPECT_EQ(p.cell_of(2.1), 3u);
  const std::vector<double> r = {-3.0, -1.0, 0.0, 0.5, 9.0};
  const std::vector<std::size_t> expect = {2, 1, 1, 1};
  EXPECT_EQ(p.counts(r), expect);
  EXPECT_THROW(ControlPartition({1.0, 0.0}), Error);
}
