#pragma once

// Dirichlet process constructions: the symmetric finite approximation, the
// stick-breaking series with a general Beta stick law, a random number of
// atoms, and conjugate updating.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "npbayes/base_distribution.hpp"
#include "npbayes/randkit.hpp"

namespace npbayes {

/// Smallest concentration accepted as a stand-in for the b -> 0 limit.
inline constexpr double kSmallConcentration = 1e-8;

/// Stick law Beta(a, b) of the generalized process.
struct StickLaw {
  double a;
  double b;
};

class DPParams {
 public:
  /// Dirichlet process: sticks follow Beta(1, b).
  DPParams(double b, BaseDistribution base);
  /// Generalized process with sticks Beta(stick.a, stick.b).
  DPParams(double b, BaseDistribution base, StickLaw stick);

  double concentration() const { return b_; }
  const BaseDistribution& base() const { return base_; }
  double stick_a() const { return stick_ ? stick_->a : 1.0; }
  double stick_b() const { return stick_ ? stick_->b : b_; }
  /// True when the stick law is Beta(1, b).
  bool is_dirichlet() const;

  friend bool operator==(const DPParams& x, const DPParams& y);

 private:
  double b_;
  BaseDistribution base_;
  std::optional<StickLaw> stick_;
};

/// A realized discrete random probability measure.
///
/// Invariant: weights are nonnegative and sum(weights) + residual_mass = 1
/// within 1e-12. `residual_mass` is the stick mass left when a series was
/// truncated; it is zero for finite constructions.
class AtomicMeasure {
 public:
  AtomicMeasure(std::vector<double> atoms, std::vector<double> weights, double residual_mass = 0.0);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  double residual_mass() const { return residual_; }

  /// P(A) for A = (-inf, x].
  double mass_at_or_below(double x) const;
  /// P((lo, hi]).
  double mass_in(double lo, double hi) const;
  /// int g dP over the realized atoms, renormalized by the realized mass so
  /// that truncation does not bias the mean downward.
  double integrate(const std::function<double(double)>& g) const;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
  double residual_;
};

/// Distribution of the random number of atoms M in random_m_sample.
class CountLaw {
 public:
  static CountLaw degenerate(std::uint64_t m);
  /// M = 1 + Poisson(mean); Pr{M > m} > 0 for every m.
  static CountLaw one_plus_poisson(double mean);
  static CountLaw custom(std::function<std::uint64_t(RngState&)> sampler);

  std::uint64_t sample(RngState& rng) const;

 private:
  explicit CountLaw(std::function<std::uint64_t(RngState&)> s) : sampler_(std::move(s)) {}
  std::function<std::uint64_t(RngState&)> sampler_;
};

/// P_m = sum_j beta_j delta(xi_j), beta ~ Dir(b/m, ..., b/m), xi_j iid from the base.
AtomicMeasure finite_approx_sample(std::uint64_t m, const DPParams& params, RngState& rng);

/// Maximum number of sticks drawn before stick_breaking_sample gives up.
inline constexpr std::size_t kMaxSticks = 10'000'000;

/// Stick-breaking series, stopped once the unallocated mass is <= truncation_eps.
AtomicMeasure stick_breaking_sample(const DPParams& params, double truncation_eps, RngState& rng);

/// Draws M from `m_law`, then a symmetric Dir(b/M, ..., b/M) measure on M atoms.
AtomicMeasure random_m_sample(const CountLaw& m_law, const DPParams& params, RngState& rng);

/// Conjugate update: total measure b*P0 + n*Pn. Requires a Dirichlet stick law.
/// Repeated updates accumulate data into the same mixture so that updating
/// with D1 then D2 equals one update with D1 and D2 together.
DPParams posterior_update(const DPParams& params, const std::vector<double>& data);

/// Law of P(A) given P0(A).
struct SetProbabilityLaw {
  std::optional<BetaLaw> law;   ///< empty when degenerate
  bool degenerate = false;      ///< P0(A) in {0, 1}: point mass
  double point_mass = 0.0;      ///< location of the point mass when degenerate
  double mean = 0.0;
  double variance = 0.0;
};

SetProbabilityLaw set_probability_law(const DPParams& params, double p0A);

}  // namespace npbayes
