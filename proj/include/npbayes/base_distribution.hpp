#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "npbayes/randkit.hpp"

namespace npbayes {

/// A distribution on the real line used as the centre measure of a Dirichlet
/// process (P0, F0, G0). Immutable; copies share their storage.
///
/// Four families are supported. `mixture` represents a posterior total
/// measure b0*P0 + sum_i delta(x_i): the continuous part keeps weight
/// b0 / (b0 + n) and each stored atom weight 1 / (b0 + n).
class BaseDistribution {
 public:
  enum class Family { uniform, normal, empirical, mixture };

  static BaseDistribution uniform(double lo, double hi);
  static BaseDistribution normal(double mean, double sd);
  static BaseDistribution empirical(std::vector<double> points);
  /// `component` must not itself be a mixture. Atoms are stored sorted.
  static BaseDistribution mixture(const BaseDistribution& component, double prior_mass,
                                  std::vector<double> atoms);

  Family family() const;

  double cdf(double x) const;
  /// inf{x : cdf(x) >= p}, p in [0,1]; may be infinite at p = 0 or 1.
  double quantile(double p) const;
  double sample(RngState& rng) const;
  double mean() const;
  /// Finite support bounds [lo, hi] if the distribution has them.
  std::optional<std::pair<double, double>> support() const;
  /// True when cdf has no jumps.
  bool is_continuous() const;

  // Family parameters. Calling an accessor for another family throws.
  std::pair<double, double> uniform_bounds() const;
  std::pair<double, double> normal_params() const;
  const std::vector<double>& points() const;        // empirical points or mixture atoms (sorted)
  const BaseDistribution& component() const;        // mixture only
  double prior_mass() const;                        // mixture only
  double component_weight() const;                  // mixture only: b0 / (b0 + n)

  friend bool operator==(const BaseDistribution& a, const BaseDistribution& b);

 private:
  struct Uniform {
    double lo, hi;
  };
  struct Normal {
    double mean, sd;
  };
  struct Empirical {
    std::vector<double> sorted;
  };
  struct Mixture {
    std::shared_ptr<const BaseDistribution> component;
    double prior_mass;
    std::vector<double> sorted_atoms;
  };
  using Storage = std::variant<Uniform, Normal, Empirical, Mixture>;

  explicit BaseDistribution(std::shared_ptr<const Storage> s) : impl_(std::move(s)) {}

  std::shared_ptr<const Storage> impl_;
};

double standard_normal_cdf(double x);
double standard_normal_quantile(double p);

}  // namespace npbayes
