#pragma once

// Quantile pyramids on [0,1]: dyadic quantiles q(j / 2^m) drawn level by
// level inside the interval spanned by their two parents, the two
// likelihoods for data given a finite pyramid, and a tree-ordered
// Metropolis-within-Gibbs posterior sampler.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "npbayes/randkit.hpp"

namespace npbayes {

/// Base density h on [0,1] rescaled to h(x) / int_a^b h on sub-intervals.
class LevelDensity {
 public:
  static LevelDensity uniform();
  static LevelDensity beta(double alpha, double beta);

  bool is_uniform() const { return uniform_; }
  double alpha() const { return alpha_; }
  double beta_param() const { return beta_; }

  /// log h(x) for x in (0,1).
  double log_density(double x) const;
  /// int_lo^hi h.
  double mass(double lo, double hi) const;
  /// One draw from h restricted to [lo, hi].
  double sample(double lo, double hi, RngState& rng) const;

 private:
  LevelDensity(bool uniform, double a, double b) : uniform_(uniform), alpha_(a), beta_(b) {}
  bool uniform_;
  double alpha_;
  double beta_;
};

/// Dyadic quantiles q_k = Q(k / 2^m) for k = 1..2^m - 1, with Q(0) = 0 and
/// Q(1) = 1 implied. Linear interpolation defines Q between nodes.
class Pyramid {
 public:
  Pyramid(int depth, std::vector<double> values);

  int depth() const { return depth_; }
  std::size_t cells() const { return values_.size() + 1; }
  std::size_t nodes() const { return values_.size(); }
  /// Q(k / 2^m) for k = 0..2^m (endpoints included).
  double at(std::size_t k) const;
  const std::vector<double>& values() const { return values_; }
  void set(std::size_t k, double v) { values_[k - 1] = v; }
  /// Strictly increasing, within (0,1).
  bool is_valid() const;
  /// Linear interpolation of Q at level y in [0,1].
  double quantile(double y) const;

 private:
  int depth_;
  std::vector<double> values_;
};

inline constexpr int kDefaultPyramidDepth = 4;

/// Node indices k (of k / 2^m) in tree order: the median, the quartiles, ...
std::vector<std::size_t> tree_order(int depth);
/// Level 1..depth at which node k is drawn.
int node_level(int depth, std::size_t k);
/// Reduced fraction label, e.g. "1/2", "3/16".
std::string node_label(int depth, std::size_t k);

Pyramid sample_prior(int depth, const LevelDensity& h, RngState& rng);

/// log prior density of a pyramid: sum over nodes of log h(q) - log mass(parent interval).
double prior_log_density(const Pyramid& pyr, const LevelDensity& h);

/// Counts N_j of data in cell j = [q_(j-1), q_j), last cell closed.
std::vector<std::size_t> cell_counts(const Pyramid& pyr, std::span<const double> sorted_data);

/// log L1 = sum_j N_j log(1 / (q_j - q_(j-1))). Data must lie in [0,1].
double loglik_interp(const Pyramid& pyr, std::span<const double> data);

/// log L2 = log n! - sum_j log N_j! + n log(2^-m).
double loglik_substitute(const Pyramid& pyr, std::span<const double> data);

enum class PyramidLikelihood { interpolation, substitute };

struct PyramidSamplerOptions {
  std::size_t iterations = 10000;  ///< full sweeps over the tree
  std::size_t burn_in = 1000;      ///< sweeps discarded before retaining
  std::size_t thin = 1;            ///< keep every thin-th sweep after burn-in
  double proposal_scale = 0.5;     ///< half-width as a fraction of the parent interval
};

struct PyramidChain {
  std::vector<std::size_t> iteration;  ///< sweep number of each retained draw
  std::vector<Pyramid> draws;
  double acceptance_rate = 0.0;
};

/// Systematic-scan Metropolis-within-Gibbs. Each node, in tree order, gets a
/// reflected uniform random-walk proposal inside its parent interval and is
/// accepted with the prior x likelihood ratio. The chain starts from the
/// dyadic pyramid q_k = k / 2^m.
PyramidChain posterior_sampler(int depth, const LevelDensity& h, std::span<const double> data,
                               PyramidLikelihood likelihood, const PyramidSamplerOptions& options,
                               RngState& rng);

}  // namespace npbayes
