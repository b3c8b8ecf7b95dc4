#pragma once

// Quantile inference under a Dirichlet process prior: prior and posterior
// laws of Q(y), the Bernstein-polynomial quantile estimator arising as the
// b -> 0 limit, and the automatic density estimator derived from it.

#include <span>
#include <vector>

#include "npbayes/base_distribution.hpp"

namespace npbayes {

/// Strictly increasing data x_(1) < ... < x_(n), n >= 1. Ties are rejected.
class SortedSample {
 public:
  /// Sorts `values`; throws on ties, non-finite values or an empty list.
  static SortedSample from_values(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

 private:
  explicit SortedSample(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

/// Pr{Q(y) <= x} for Q the quantile function of a Dir(b, F0) process.
double prior_quantile_cdf(double y, double x, double b, const BaseDistribution& f0);

/// Posterior law of Q(y) given the data: a continuous part inside data
/// windows plus point masses at the data points. b = 0 gives the limit law
/// with atoms only.
class QuantilePosteriorLaw {
 public:
  struct Atom {
    double location;
    double mass;
  };

  QuantilePosteriorLaw(double y, std::span<const double> sorted_data, double b, BaseDistribution f0);

  double y() const { return y_; }
  double concentration() const { return b_; }
  std::size_t sample_size() const { return data_.size(); }

  /// H(x) = Pr{Q(y) <= x | data}; right-continuous.
  double cdf(double x) const;
  /// H(x-): the limit from the left.
  double cdf_left(double x) const;
  const std::vector<Atom>& atoms() const { return atoms_; }
  /// Mass of the continuous part inside window i = 0..n, where window i is
  /// (x_(i), x_(i+1)) with x_(0) = -inf and x_(n+1) = +inf.
  double window_mass(std::size_t i) const;
  double continuous_mass() const;
  /// Posterior mean E{Q(y) | data} by adaptive quadrature of the cdf.
  double mean() const;

 private:
  // Window index i with x_(i) <= x < x_(i+1).
  std::size_t window_of(double x) const;
  double segment_cdf(std::size_t i, double x) const;

  double y_;
  double b_;
  std::vector<double> data_;
  BaseDistribution f0_;
  std::vector<Atom> atoms_;
};

QuantilePosteriorLaw posterior_quantile_law(double y, const SortedSample& data, double b,
                                            const BaseDistribution& f0);

/// Limit (b = 0) point masses C(n-1, i-1) y^(i-1) (1-y)^(n-i), i = 1..n.
std::vector<double> noninf_point_masses(double y, std::size_t n);

/// Bernstein quantile estimator: the mean of the b = 0 posterior law.
/// Defined on the closed interval [0,1] by continuity.
double bernstein_quantile(double y, const SortedSample& data);

/// d/dy of bernstein_quantile, from the Bernstein derivative formula.
double bernstein_quantile_derivative(double y, const SortedSample& data);

/// E{Q(y) | data} for b > 0.
double quantile_posterior_mean(double y, const SortedSample& data, double b, const BaseDistribution& f0);

/// E Q(y) before any data.
double prior_quantile_mean(double y, double b, const BaseDistribution& f0);

/// Density estimate 1 / q0(F0hat(x)), where q0 is the derivative of the
/// Bernstein quantile estimator and F0hat its inverse. Zero outside
/// [x_(1), x_(n)]; needs n >= 3.
class AutomaticDensity {
 public:
  explicit AutomaticDensity(SortedSample data);

  double operator()(double x) const;
  /// Fhat(x) solving Qhat(Fhat(x)) = x by bisection; 0 below, 1 above the data.
  double cdf(double x) const;
  double lower() const { return data_.front(); }
  double upper() const { return data_.back(); }
  const SortedSample& data() const { return data_; }

 private:
  SortedSample data_;
};

AutomaticDensity automatic_density(const SortedSample& data);

}  // namespace npbayes
