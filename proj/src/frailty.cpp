#include "npbayes/frailty.hpp"

#include <algorithm>
#include <cmath>

#include "npbayes/error.hpp"

namespace npbayes {

namespace {

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

JumpLaw JumpLaw::gamma(double nu) {
  require(positive_finite(nu), Errc::domain_error, "gamma jump law: shape must be positive");
  return JumpLaw(Kind::gamma, nu, 0.0);
}

JumpLaw JumpLaw::point_mass(double c) {
  require(c >= 0.0 && std::isfinite(c), Errc::domain_error, "point-mass jump law: size must be >= 0");
  return JumpLaw(Kind::point_mass, c, 0.0);
}

JumpLaw JumpLaw::beta_risk(double a, double b) {
  require(positive_finite(a) && positive_finite(b), Errc::domain_error,
          "beta jump law: parameters must be positive");
  return JumpLaw(Kind::beta_risk, a, b);
}

double JumpLaw::log_laplace(double u) const {
  require(u >= 0.0, Errc::domain_error, "Laplace transform: argument must be >= 0");
  if (u == 0.0) return 0.0;
  switch (kind_) {
    case Kind::gamma:
      return -p1_ * std::log1p(u);
    case Kind::point_mass:
      return -u * p1_;
    case Kind::beta_risk:
      if (std::isinf(u)) return -u;
      return log_gamma(p2_ + u) + log_gamma(p1_ + p2_) - log_gamma(p2_) - log_gamma(p1_ + p2_ + u);
  }
  fail(Errc::unsupported, "unknown jump law");
}

double JumpLaw::laplace(double u) const { return std::exp(log_laplace(u)); }

double JumpLaw::sample(RngState& rng) const {
  switch (kind_) {
    case Kind::gamma:
      return sample_gamma(p1_, rng);
    case Kind::point_mass:
      return p1_;
    case Kind::beta_risk: {
      // 1 - R ~ Beta(b, a); work in logs so tiny 1 - R stays resolved.
      const double la = sample_log_gamma(p1_, rng);
      const double lb = sample_log_gamma(p2_, rng);
      const double hi = std::max(la, lb);
      const double log_total = hi + std::log(std::exp(la - hi) + std::exp(lb - hi));
      return log_total - lb;
    }
  }
  fail(Errc::unsupported, "unknown jump law");
}

CumulativeRate CumulativeRate::linear(double kappa) { return power(kappa, 1.0); }

CumulativeRate CumulativeRate::power(double kappa, double p) {
  require(kappa >= 0.0 && std::isfinite(kappa), Errc::domain_error, "cumulative rate: kappa must be >= 0");
  require(positive_finite(p), Errc::domain_error, "cumulative rate: exponent must be positive");
  return CumulativeRate(kappa, p);
}

double CumulativeRate::cumulative(double t) const {
  require(t >= 0.0, Errc::domain_error, "cumulative rate: time must be >= 0");
  return p_ == 1.0 ? kappa_ * t : kappa_ * std::pow(t, p_);
}

double CumulativeRate::rate(double t) const {
  require(t >= 0.0, Errc::domain_error, "rate: time must be >= 0");
  if (p_ == 1.0) return kappa_;
  return kappa_ * p_ * std::pow(t, p_ - 1.0);
}

double CumulativeRate::inverse(double v) const {
  require(kappa_ > 0.0, Errc::domain_error, "cumulative rate: inverse needs kappa > 0");
  return p_ == 1.0 ? v / kappa_ : std::pow(v / kappa_, 1.0 / p_);
}

std::size_t DamagePath::jumps_by(double t) const {
  return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

double DamagePath::damage_at(double t) const {
  require(t >= 0.0 && t <= t_max, Errc::domain_error, "damage_at: time outside [0, t_max]");
  const std::size_t k = jumps_by(t);
  return k == 0 ? 0.0 : levels[k - 1];
}

double DamagePath::conditional_survival(double t) const { return std::exp(-damage_at(t)); }

void validate(const FrailtySpec& spec) {
  require(spec.theta >= 0.0 && std::isfinite(spec.theta), Errc::domain_error, "frailty: theta must be >= 0");
}

DamagePath simulate_path(const FrailtySpec& spec, double t_max, RngState& rng) {
  validate(spec);
  require(positive_finite(t_max), Errc::domain_error, "simulate_path: t_max must be positive");
  DamagePath path;
  path.t_max = t_max;
  const double total = spec.rate.cumulative(t_max);
  const std::uint64_t count = total > 0.0 ? sample_poisson(total, rng) : 0;
  // Given the count, jump epochs are iid with cdf Lambda(t) / Lambda(t_max).
  std::vector<double> u(count);
  for (auto& v : u) v = rng.uniform();
  std::sort(u.begin(), u.end());
  path.times.reserve(count);
  path.levels.reserve(count);
  double z = 0.0;
  for (double v : u) {
    path.times.push_back(std::min(t_max, spec.rate.inverse(v * total)));
    z += spec.theta * spec.jump.sample(rng);
    path.levels.push_back(z);
  }
  return path;
}

double thinning_factor(const FrailtySpec& spec) {
  validate(spec);
  if (spec.jump.kind() == JumpLaw::Kind::beta_risk && spec.theta == 1.0) {
    return spec.jump.p1() / (spec.jump.p1() + spec.jump.p2());
  }
  return -std::expm1(spec.jump.log_laplace(spec.theta));
}

double marginal_survival(const FrailtySpec& spec, double t) {
  return std::exp(-spec.rate.cumulative(t) * thinning_factor(spec));
}

double hazard_rate(const FrailtySpec& spec, double s) { return spec.rate.rate(s) * thinning_factor(spec); }

double IndividualHazard::operator()(double s) const { return baseline_.rate(s) * (multiplier_ * thinning_factor(spec_)); }

double IndividualHazard::cumulative(double t) const {
  return baseline_.cumulative(t) * (multiplier_ * thinning_factor(spec_));
}

double IndividualHazard::survival(double t) const { return std::exp(-cumulative(t)); }

std::vector<IndividualHazard> regression_hazards(std::span<const std::vector<double>> covariates,
                                                 const RegressionSpec& spec) {
  const bool multiplier = spec.structure == HazardStructure::beta_multiplier;
  if (multiplier) {
    require(positive_finite(spec.c), Errc::domain_error, "beta multiplier: c must be positive");
  } else {
    require(spec.theta >= 0.0 && std::isfinite(spec.theta), Errc::domain_error, "cox: theta must be >= 0");
  }
  const auto dot = [](std::span<const double> a, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
    return s;
  };
  std::vector<IndividualHazard> out;
  out.reserve(covariates.size());
  for (const auto& x : covariates) {
    require(x.size() == spec.beta.size(), Errc::invalid_argument,
            "regression_hazards: covariate and beta lengths differ");
    const double m = std::exp(dot(spec.beta, x));
    require(std::isfinite(m), Errc::numerical_failure, "regression_hazards: exp(beta^T x) overflows");
    FrailtySpec individual;
    individual.rate = CumulativeRate::power(spec.baseline.kappa() * m, spec.baseline.exponent());
    if (multiplier) {
      require(x.size() == spec.gamma.size(), Errc::invalid_argument,
              "regression_hazards: covariate and gamma lengths differ");
      const double mu = 1.0 / (1.0 + std::exp(-dot(spec.gamma, x)));
      const double a = spec.c * mu;
      const double b = spec.c - a;
      require(a > 0.0 && b > 0.0, Errc::domain_error, "beta multiplier: Beta parameters must be positive");
      individual.theta = 1.0;
      individual.jump = JumpLaw::beta_risk(a, b);
    } else {
      individual.theta = spec.theta;
      individual.jump = spec.jump;
    }
    out.emplace_back(spec.baseline, m, individual);
  }
  return out;
}

}  // namespace npbayes
