#include "npbayes/randkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "npbayes/error.hpp"

namespace npbayes {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Marsaglia & Tsang (2000) squeeze/rejection sampler, valid for shape >= 1.
double gamma_marsaglia_tsang(double shape, RngState& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = sample_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Hormann (1993) transformed rejection with squeeze, for mean >= 10.
std::uint64_t poisson_ptrs(double mean, RngState& rng) {
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * log_mean - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
  return splitmix64(parent ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

RngState::RngState(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RngState RngState::split(std::uint64_t stream) const { return RngState(derive_seed(seed_, stream)); }

double RngState::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngState::uniform_index(std::uint64_t n) {
  require(n > 0, Errc::domain_error, "uniform_index: n must be positive");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % n;
  }
}

BetaLaw::BetaLaw(double a, double b) : alpha(a), beta(b) {
  require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b), Errc::domain_error,
          "BetaLaw: parameters must be positive and finite");
}

double BetaLaw::variance() const {
  const double s = alpha + beta;
  return alpha * beta / (s * s * (s + 1.0));
}

double BetaLaw::cdf(double x) const { return reg_inc_beta(std::clamp(x, 0.0, 1.0), alpha, beta); }

double reg_inc_beta(double x, double a, double c) {
  require(x >= 0.0 && x <= 1.0, Errc::domain_error, "reg_inc_beta: x must lie in [0,1]");
  require(a > 0.0 && c > 0.0 && std::isfinite(a) && std::isfinite(c), Errc::domain_error,
          "reg_inc_beta: shape parameters must be positive and finite");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return boost::math::ibeta(a, c, x);
}

double log_gamma(double x) {
  require(x > 0.0 && std::isfinite(x), Errc::domain_error, "log_gamma: argument must be positive");
  return boost::math::lgamma(x);
}

double sample_normal(RngState& rng) {
  // Marsaglia polar method; the second variate is discarded so that the
  // stream has no hidden cache.
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double sample_exponential(RngState& rng) { return -std::log(rng.uniform()); }

double sample_log_gamma(double shape, RngState& rng) {
  require(shape > 0.0 && std::isfinite(shape), Errc::domain_error,
          "sample_gamma: shape must be positive");
  if (shape >= 1.0) return std::log(gamma_marsaglia_tsang(shape, rng));
  // Boost for shape < 1: G(a) = G(a + 1) * U^(1/a), kept in log space.
  const double boosted = gamma_marsaglia_tsang(shape + 1.0, rng);
  return std::log(boosted) + std::log(rng.uniform()) / shape;
}

double sample_gamma(double shape, RngState& rng) {
  require(shape > 0.0 && std::isfinite(shape), Errc::domain_error,
          "sample_gamma: shape must be positive");
  if (shape >= 1.0) return gamma_marsaglia_tsang(shape, rng);
  return std::exp(sample_log_gamma(shape, rng));
}

double sample_beta(double a, double b, RngState& rng) {
  require(a > 0.0 && b > 0.0, Errc::domain_error, "sample_beta: parameters must be positive");
  const double la = sample_log_gamma(a, rng);
  const double lb = sample_log_gamma(b, rng);
  // X / (X + Y) = 1 / (1 + exp(lb - la))
  return 1.0 / (1.0 + std::exp(lb - la));
}

std::uint64_t sample_poisson(double mean, RngState& rng) {
  require(mean >= 0.0 && std::isfinite(mean), Errc::domain_error,
          "sample_poisson: mean must be nonnegative and finite");
  if (mean == 0.0) return 0;
  if (mean >= 10.0) return poisson_ptrs(mean, rng);
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double prod = rng.uniform();
  while (prod > limit) {
    ++k;
    prod *= rng.uniform();
  }
  return k;
}

std::vector<double> sample_dirichlet(std::span<const double> alphas, RngState& rng) {
  require(!alphas.empty(), Errc::domain_error, "sample_dirichlet: empty parameter list");
  for (double a : alphas) {
    require(a > 0.0 && std::isfinite(a), Errc::domain_error,
            "sample_dirichlet: parameters must be positive");
  }
  std::vector<double> out(alphas.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out[i] = sample_log_gamma(alphas[i], rng);
    top = std::max(top, out[i]);
  }
  double total = 0.0;
  for (double& w : out) {
    w = std::exp(w - top);
    total += w;
  }
  for (double& w : out) w /= total;
  return out;
}

}  // namespace npbayes
