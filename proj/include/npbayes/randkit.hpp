#pragma once

// Seeded random streams and the special functions used throughout the library.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace npbayes {

/// A deterministic random stream. Identical seeds give identical draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; all variate generation on top of it is implemented here so that
/// streams are reproducible across standard libraries.
class RngState {
 public:
  explicit RngState(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent child stream number `stream`. The child seed is
  /// `derive_seed(seed(), stream)`.
  RngState split(std::uint64_t stream) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0,1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64-based sub-seed derivation used by RngState::split.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

struct BetaLaw {
  double alpha;
  double beta;

  BetaLaw(double alpha, double beta);
  double mean() const { return alpha / (alpha + beta); }
  double variance() const;
  double cdf(double x) const;
};

/// Regularized incomplete beta I_x(a, c): the Beta(a, c) distribution function.
double reg_inc_beta(double x, double a, double c);

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// One Gamma(shape, 1) draw.
double sample_gamma(double shape, RngState& rng);

/// log of one Gamma(shape, 1) draw. Stays finite for tiny shapes where the
/// draw itself underflows to zero.
double sample_log_gamma(double shape, RngState& rng);

double sample_normal(RngState& rng);
double sample_exponential(RngState& rng);
double sample_beta(double a, double b, RngState& rng);
std::uint64_t sample_poisson(double mean, RngState& rng);

/// Dirichlet(alphas) as normalized independent Gamma draws, computed in log
/// space (log-sum-exp normalization) so that shapes down to ~1e-300 work.
std::vector<double> sample_dirichlet(std::span<const double> alphas, RngState& rng);

}  // namespace npbayes
