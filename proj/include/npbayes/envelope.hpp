#pragma once

// Nonparametric envelopes around a parametric regression model
// y_i = x_i^T beta + sigma e_i, with the law G of the standardized errors
// given a Dirichlet prior centred at G0.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "npbayes/base_distribution.hpp"

namespace npbayes {

/// r_i = (y_i - x_i^T beta) / sigma.
std::vector<double> standardized_residuals(std::span<const double> y, std::span<const std::vector<double>> x,
                                           std::span<const double> beta, double sigma);

/// G_hat(t) = w_n G0(t) + (1 - w_n) n^-1 sum_i Pr{r_i <= t}, the inner
/// probability estimated as the frequency over the supplied residual draws.
/// w_n = b / (b + n) unless overridden.
class PredictiveCdf {
 public:
  PredictiveCdf(std::span<const std::vector<double>> residual_draws, double b, BaseDistribution g0,
                std::optional<double> w_override = std::nullopt);

  double operator()(double t) const;
  double weight() const { return w_; }
  std::size_t n() const { return n_; }

 private:
  std::vector<double> pooled_;  // all residuals of all draws, sorted
  std::size_t n_ = 0;
  double w_ = 1.0;
  BaseDistribution g0_;
};

double predictive_cdf(double t, std::span<const std::vector<double>> residual_draws, double b,
                      const BaseDistribution& g0, std::optional<double> w_override = std::nullopt);

/// log x^[m] = log x(x+1)...(x+m-1).
double rising_factorial_log(double x, std::size_t m);

/// log M_n = sum_j [N_j log(b z_j) - log (b z_j)^[N_j]].
double control_log_factor(std::span<const std::size_t> counts, std::span<const double> z, double b);

/// Partition of the real line into k cells by cut points c_1 < ... < c_(k-1):
/// (-inf, c_1], (c_1, c_2], ..., (c_(k-1), inf).
class ControlPartition {
 public:
  explicit ControlPartition(std::vector<double> cuts);

  std::size_t cells() const { return cuts_.size() + 1; }
  const std::vector<double>& cuts() const { return cuts_; }
  std::size_t cell_of(double r) const;
  std::vector<std::size_t> counts(std::span<const double> residuals) const;

 private:
  std::vector<double> cuts_;
};

}  // namespace npbayes
