#pragma once

// Cumulative-damage frailty processes. Z(t) = sum_{j <= M(t)} theta G_j with
// M a Poisson process of cumulative rate Lambda, survival exp(-Z(t)) given
// the path, and the marginal survival and hazard that follow from it.

#include <cstddef>
#include <span>
#include <vector>

#include "npbayes/randkit.hpp"

namespace npbayes {

/// Law of the jump sizes G_j. Every family here has a closed-form Laplace
/// transform L0(u) = E exp(-u G).
class JumpLaw {
 public:
  enum class Kind { gamma, point_mass, beta_risk };

  /// G ~ Gamma(shape nu, rate 1): L0(u) = (1+u)^-nu.
  static JumpLaw gamma(double nu);
  /// G == c: L0(u) = exp(-u c).
  static JumpLaw point_mass(double c);
  /// G = -log(1 - R), R ~ Beta(a, b): L0(u) = E (1-R)^u = B(a, b+u) / B(a, b).
  static JumpLaw beta_risk(double a, double b);

  Kind kind() const { return kind_; }
  double p1() const { return p1_; }
  double p2() const { return p2_; }

  double laplace(double u) const;
  double log_laplace(double u) const;
  double sample(RngState& rng) const;

 private:
  JumpLaw(Kind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}
  Kind kind_;
  double p1_;
  double p2_;
};

/// Cumulative Poisson rate: Lambda(t) = kappa t^p (p = 1 is the linear case).
class CumulativeRate {
 public:
  static CumulativeRate linear(double kappa);
  static CumulativeRate power(double kappa, double p);

  double kappa() const { return kappa_; }
  double exponent() const { return p_; }

  double cumulative(double t) const;
  /// lambda(t) = Lambda'(t).
  double rate(double t) const;
  double inverse(double v) const;

 private:
  CumulativeRate(double kappa, double p) : kappa_(kappa), p_(p) {}
  double kappa_;
  double p_;
};

struct FrailtySpec {
  double theta = 1.0;
  JumpLaw jump = JumpLaw::gamma(1.0);
  CumulativeRate rate = CumulativeRate::linear(1.0);
};

/// Jump times on [0, t_max] and the level of Z just after each jump.
struct DamagePath {
  double t_max = 0.0;
  std::vector<double> times;
  std::vector<double> levels;

  std::size_t jumps_by(double t) const;
  double damage_at(double t) const;
  /// exp(-Z(t)).
  double conditional_survival(double t) const;
};

void validate(const FrailtySpec& spec);

DamagePath simulate_path(const FrailtySpec& spec, double t_max, RngState& rng);

/// 1 - L0(theta).
double thinning_factor(const FrailtySpec& spec);
/// exp[-Lambda(t) (1 - L0(theta))].
double marginal_survival(const FrailtySpec& spec, double t);
/// lambda(s) (1 - L0(theta)).
double hazard_rate(const FrailtySpec& spec, double s);

enum class HazardStructure { cox, beta_multiplier };

struct RegressionSpec {
  HazardStructure structure = HazardStructure::cox;
  CumulativeRate baseline = CumulativeRate::linear(1.0);
  std::vector<double> beta;
  // cox: common theta and jump law.
  double theta = 1.0;
  JumpLaw jump = JumpLaw::gamma(1.0);
  // beta_multiplier: R ~ Beta(c mu(x), c - c mu(x)), mu(x) = logistic(gamma^T x), theta = 1.
  std::vector<double> gamma;
  double c = 1.0;
};

/// h_i(s) = lambda0(s) * multiplier * thinning.
class IndividualHazard {
 public:
  IndividualHazard(CumulativeRate baseline, double multiplier, FrailtySpec spec)
      : baseline_(baseline), multiplier_(multiplier), spec_(spec) {}

  double operator()(double s) const;
  double cumulative(double t) const;
  double survival(double t) const;
  /// exp(beta^T x).
  double multiplier() const { return multiplier_; }
  /// The individual's process: rate lambda0 e^{beta^T x}, own theta and jump law.
  const FrailtySpec& spec() const { return spec_; }

 private:
  CumulativeRate baseline_;
  double multiplier_;
  FrailtySpec spec_;
};

std::vector<IndividualHazard> regression_hazards(std::span<const std::vector<double>> covariates,
                                                 const RegressionSpec& spec);

}  // namespace npbayes
