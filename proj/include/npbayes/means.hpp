#pragma once

// Random means theta = int g dP of a (generalized) Dirichlet process: exact
// central moments via the stochastic-equation recursion, the transform
// identity, and a Markov chain whose equilibrium is the law of theta.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "npbayes/base_distribution.hpp"
#include "npbayes/dp.hpp"
#include "npbayes/randkit.hpp"

namespace npbayes {

/// E[B^i (1-B)^j] for B ~ Beta(a, b) and 0 <= i + j <= p_max.
class StickMomentTable {
 public:
  StickMomentTable(double a, double b, int p_max);

  double operator()(int i, int j) const;
  int p_max() const { return p_max_; }
  double stick_a() const { return a_; }
  double stick_b() const { return b_; }

 private:
  double a_, b_;
  int p_max_;
  std::vector<double> entries_;  // row i, column j, (p_max+1)^2
};

StickMomentTable stick_moments(double a, double b, int p_max);

/// Moments of Y = g(xi), xi ~ P0: the mean theta0 and central moments mu_p.
///
/// The factories remember where the moments came from so that the recursion
/// can be carried out in exact rational arithmetic when every input is an
/// exactly representable rational.
class BaseMomentSpec {
 public:
  static BaseMomentSpec uniform(double lo, double hi, int p_max);
  static BaseMomentSpec normal(double mean, double sd, int p_max);
  static BaseMomentSpec point_mass(double c, int p_max);
  /// `central[p]` for p = 0..p_max; central[0] must be 1 and central[1] 0.
  static BaseMomentSpec from_central(double theta0, std::vector<double> central,
                                     double support_lo, double support_hi);

  double theta0() const { return theta0_; }
  double central(int p) const;
  int p_max() const { return static_cast<int>(central_.size()) - 1; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  enum class Source { general, uniform, normal, point_mass };
  Source source() const { return source_; }
  double source_param(int k) const { return params_[k]; }

 private:
  BaseMomentSpec() = default;
  double theta0_ = 0.0;
  std::vector<double> central_;
  double lo_ = 0.0, hi_ = 0.0;
  Source source_ = Source::general;
  double params_[2] = {0.0, 0.0};
};

enum class MomentArithmetic { automatic, exact, floating };

/// Central moments m_p = E(theta - theta0)^p for p = 0..p_max (m_0 = 1, m_1 = 0),
/// solving the moment recursion one order at a time.
///
/// `automatic` uses exact rationals when the base moments have a rational
/// source (uniform, normal, point mass) and p_max <= 40, otherwise long double
/// with compensated summation.
std::vector<double> central_moments(const BaseMomentSpec& base, const StickMomentTable& sticks,
                                    int p_max, MomentArithmetic mode = MomentArithmetic::automatic);

/// The function g in theta = int g dP.
class Integrand {
 public:
  enum class Kind { identity, constant, power, custom };

  static Integrand identity();
  static Integrand constant(double c);
  static Integrand power(double k);
  static Integrand custom(std::function<double(double)> fn, std::string name);

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  double param() const { return param_; }
  const std::string& name() const { return name_; }

 private:
  Kind kind_ = Kind::identity;
  double param_ = 0.0;
  std::function<double(double)> fn_;
  std::string name_;
};

struct TransformReport {
  double u = 0.0;
  double lhs_mc = 0.0;
  double mc_se = 0.0;
  double rhs_exact = 0.0;
  bool within(double n_se) const;
};

/// exp[-b int log(1 + u g) dP0] by Gauss quadrature with `quad_points` nodes,
/// verified against a rule with twice as many nodes.
double transform_rhs(double u, const DPParams& params, const Integrand& g, std::size_t quad_points);

/// Monte Carlo check of E (1 + u int g dP)^(-b) against transform_rhs, using
/// n_sim stick-breaking draws. Requires the Dirichlet stick law.
TransformReport transform_identity_check(double u, const DPParams& params, const Integrand& g,
                                         std::size_t n_sim, std::size_t quad_points, RngState& rng,
                                         double truncation_eps = 1e-12);

using VariateSampler = std::function<double(RngState&)>;

/// Sampler for Y = g(xi) with xi drawn from `base`.
VariateSampler transformed_sampler(const BaseDistribution& base, const Integrand& g);

inline std::size_t default_burn_in(std::size_t steps) { return steps / 100; }

/// Iterates theta <- B Y + (1 - B) theta from theta_0 = Y_0 and returns the
/// steps - burn_in values after burn-in.
std::vector<double> stochastic_chain(double stick_a, double stick_b, const VariateSampler& y,
                                     std::size_t steps, std::size_t burn_in, RngState& rng);

/// Optional post-processing of chain output: an affine map that makes the
/// sample mean and variance equal to the exact values. This is not part of
/// the chain itself.
void affine_correct(std::span<double> samples, double target_mean, double target_variance);

/// Sample moments (1/n) sum (x - centre)^p for p = 0..p_max.
std::vector<double> empirical_central_moments(std::span<const double> samples, double centre,
                                              int p_max);

}  // namespace npbayes
