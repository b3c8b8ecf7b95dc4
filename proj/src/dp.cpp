#include "npbayes/dp.hpp"

#include <algorithm>
#include <cmath>

#include "npbayes/error.hpp"

namespace npbayes {

namespace {

void check_concentration(double b) {
  require(b > 0.0 && std::isfinite(b), Errc::domain_error, "DP concentration b must be positive");
}

}  // namespace

DPParams::DPParams(double b, BaseDistribution base) : b_(b), base_(std::move(base)) {
  check_concentration(b);
}

DPParams::DPParams(double b, BaseDistribution base, StickLaw stick)
    : b_(b), base_(std::move(base)), stick_(stick) {
  check_concentration(b);
  require(stick.a > 0.0 && stick.b > 0.0 && std::isfinite(stick.a) && std::isfinite(stick.b),
          Errc::domain_error, "stick law parameters must be positive");
}

bool DPParams::is_dirichlet() const { return stick_a() == 1.0 && stick_b() == b_; }

bool operator==(const DPParams& x, const DPParams& y) {
  return x.b_ == y.b_ && x.stick_a() == y.stick_a() && x.stick_b() == y.stick_b() &&
         x.base_ == y.base_;
}

AtomicMeasure::AtomicMeasure(std::vector<double> atoms, std::vector<double> weights, double residual)
    : atoms_(std::move(atoms)), weights_(std::move(weights)), residual_(residual) {
  require(atoms_.size() == weights_.size(), Errc::invalid_argument,
          "AtomicMeasure: atoms and weights differ in length");
  require(residual_ >= 0.0 && residual_ < 1.0, Errc::domain_error,
          "AtomicMeasure: residual mass must lie in [0,1)");
  double total = residual_;
  for (double w : weights_) {
    require(w >= 0.0 && std::isfinite(w), Errc::domain_error, "AtomicMeasure: negative weight");
    total += w;
  }
  require(std::fabs(total - 1.0) <= 1e-12, Errc::numerical_failure,
          "AtomicMeasure: weights and residual do not sum to one");
}

double AtomicMeasure::mass_at_or_below(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i] <= x) s += weights_[i];
  }
  return s;
}

double AtomicMeasure::mass_in(double lo, double hi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i] > lo && atoms_[i] <= hi) s += weights_[i];
  }
  return s;
}

double AtomicMeasure::integrate(const std::function<double(double)>& g) const {
  double s = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    s += weights_[i] * g(atoms_[i]);
    total += weights_[i];
  }
  return s / total;
}

CountLaw CountLaw::degenerate(std::uint64_t m) {
  require(m >= 1, Errc::domain_error, "CountLaw: m must be at least 1");
  return CountLaw([m](RngState&) { return m; });
}

CountLaw CountLaw::one_plus_poisson(double mean) {
  require(mean >= 0.0 && std::isfinite(mean), Errc::domain_error, "CountLaw: invalid Poisson mean");
  return CountLaw([mean](RngState& rng) { return 1 + sample_poisson(mean, rng); });
}

CountLaw CountLaw::custom(std::function<std::uint64_t(RngState&)> sampler) {
  require(static_cast<bool>(sampler), Errc::invalid_argument, "CountLaw: empty sampler");
  return CountLaw(std::move(sampler));
}

std::uint64_t CountLaw::sample(RngState& rng) const {
  const std::uint64_t m = sampler_(rng);
  require(m >= 1, Errc::domain_error, "CountLaw: sampled a count below 1");
  return m;
}

AtomicMeasure finite_approx_sample(std::uint64_t m, const DPParams& params, RngState& rng) {
  require(m >= 1, Errc::domain_error, "finite_approx_sample: m must be at least 1");
  const std::vector<double> alphas(m, params.concentration() / static_cast<double>(m));
  std::vector<double> weights = sample_dirichlet(alphas, rng);
  std::vector<double> atoms(m);
  for (auto& a : atoms) a = params.base().sample(rng);
  return AtomicMeasure(std::move(atoms), std::move(weights), 0.0);
}

AtomicMeasure stick_breaking_sample(const DPParams& params, double truncation_eps, RngState& rng) {
  require(truncation_eps > 0.0 && truncation_eps < 1.0, Errc::domain_error,
          "stick_breaking_sample: truncation_eps must lie in (0,1)");
  const double a = params.stick_a();
  const double b = params.stick_b();
  std::vector<double> atoms;
  std::vector<double> weights;
  // The remaining mass is tracked in log space; it is the product of the
  // complementary sticks.
  double log_remaining = 0.0;
  const double log_eps = std::log(truncation_eps);
  while (log_remaining > log_eps) {
    if (weights.size() >= kMaxSticks) {
      fail(Errc::limit_exceeded, "stick_breaking_sample: stick count cap reached (sticks near zero)");
    }
    const double la = sample_log_gamma(a, rng);
    const double lb = sample_log_gamma(b, rng);
    const double top = std::max(la, lb);
    const double lse = top + std::log(std::exp(la - top) + std::exp(lb - top));
    const double log_stick = la - lse;       // log B
    const double log_complement = lb - lse;  // log (1 - B)
    weights.push_back(std::exp(log_remaining + log_stick));
    atoms.push_back(params.base().sample(rng));
    log_remaining += log_complement;
  }
  // Recompute the residual from the realized weights so the simplex
  // identity holds to rounding.
  double allocated = 0.0;
  for (double w : weights) allocated += w;
  const double residual = std::clamp(1.0 - allocated, 0.0, std::exp(log_remaining));
  return AtomicMeasure(std::move(atoms), std::move(weights), residual);
}

AtomicMeasure random_m_sample(const CountLaw& m_law, const DPParams& params, RngState& rng) {
  return finite_approx_sample(m_law.sample(rng), params, rng);
}

DPParams posterior_update(const DPParams& params, const std::vector<double>& data) {
  require(params.is_dirichlet(), Errc::unsupported,
          "posterior_update: conjugate updating is only available for the Dirichlet stick law");
  if (data.empty()) return params;
  for (double x : data) require(std::isfinite(x), Errc::domain_error, "posterior_update: non-finite datum");

  const BaseDistribution& base = params.base();
  double prior_mass = params.concentration();
  const BaseDistribution* component = &base;
  std::vector<double> atoms;
  if (base.family() == BaseDistribution::Family::mixture) {
    prior_mass = base.prior_mass();
    component = &base.component();
    atoms = base.points();
    require(params.concentration() == prior_mass + static_cast<double>(atoms.size()),
            Errc::unsupported,
            "posterior_update: mixture base is not a posterior total measure for this b");
  }
  atoms.insert(atoms.end(), data.begin(), data.end());
  const double b = prior_mass + static_cast<double>(atoms.size());
  return DPParams(b, BaseDistribution::mixture(*component, prior_mass, std::move(atoms)));
}

SetProbabilityLaw set_probability_law(const DPParams& params, double p0A) {
  require(p0A >= 0.0 && p0A <= 1.0, Errc::domain_error, "set_probability_law: P0(A) outside [0,1]");
  const double b = params.concentration();
  SetProbabilityLaw out;
  out.mean = p0A;
  out.variance = p0A * (1.0 - p0A) / (1.0 + b);
  if (p0A == 0.0 || p0A == 1.0) {
    out.degenerate = true;
    out.point_mass = p0A;
    return out;
  }
  out.law = BetaLaw(b * p0A, b * (1.0 - p0A));
  return out;
}

}  // namespace npbayes
