#include "npbayes/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "npbayes/error.hpp"
#include "npbayes/randkit.hpp"

namespace npbayes {

namespace {

constexpr std::size_t kDirectProductLimit = 64;

}  // namespace

std::vector<double> standardized_residuals(std::span<const double> y, std::span<const std::vector<double>> x,
                                           std::span<const double> beta, double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), Errc::domain_error, "residuals: sigma must be positive");
  require(y.size() == x.size(), Errc::invalid_argument, "residuals: y and x lengths differ");
  std::vector<double> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    require(x[i].size() == beta.size(), Errc::invalid_argument, "residuals: covariate and beta lengths differ");
    double fit = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) fit += x[i][j] * beta[j];
    r[i] = (y[i] - fit) / sigma;
  }
  return r;
}

PredictiveCdf::PredictiveCdf(std::span<const std::vector<double>> residual_draws, double b, BaseDistribution g0,
                             std::optional<double> w_override)
    : g0_(std::move(g0)) {
  require(b > 0.0 && std::isfinite(b), Errc::domain_error, "predictive cdf: b must be positive");
  if (!residual_draws.empty()) n_ = residual_draws.front().size();
  for (const auto& draw : residual_draws) {
    require(draw.size() == n_, Errc::invalid_argument, "predictive cdf: draws have different sizes");
    for (double r : draw) {
      require(!std::isnan(r), Errc::domain_error, "predictive cdf: NaN residual");
      pooled_.push_back(r);
    }
  }
  std::sort(pooled_.begin(), pooled_.end());
  if (w_override) {
    require(*w_override >= 0.0 && *w_override <= 1.0, Errc::domain_error, "predictive cdf: w must lie in [0,1]");
    w_ = *w_override;
  } else {
    w_ = b / (b + static_cast<double>(n_));
  }
}

double PredictiveCdf::operator()(double t) const {
  const double prior = g0_.cdf(t);
  if (n_ == 0) return prior;
  const auto below = std::upper_bound(pooled_.begin(), pooled_.end(), t) - pooled_.begin();
  const double freq = static_cast<double>(below) / static_cast<double>(pooled_.size());
  return w_ * prior + (1.0 - w_) * freq;
}

double predictive_cdf(double t, std::span<const std::vector<double>> residual_draws, double b,
                      const BaseDistribution& g0, std::optional<double> w_override) {
  return PredictiveCdf(residual_draws, b, g0, w_override)(t);
}

double rising_factorial_log(double x, std::size_t m) {
  require(x > 0.0 && std::isfinite(x), Errc::domain_error, "rising factorial: x must be positive");
  if (m == 0) return 0.0;
  if (m <= kDirectProductLimit) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += std::log(x + static_cast<double>(i));
    return s;
  }
  return log_gamma(x + static_cast<double>(m)) - log_gamma(x);
}

double control_log_factor(std::span<const std::size_t> counts, std::span<const double> z, double b) {
  require(b > 0.0 && std::isfinite(b), Errc::domain_error, "control factor: b must be positive");
  require(counts.size() == z.size() && !z.empty(), Errc::invalid_argument,
          "control factor: counts and z must have the same nonzero length");
  double total_z = 0.0;
  for (double zj : z) {
    require(zj > 0.0 && std::isfinite(zj), Errc::domain_error, "control factor: z_j must be positive");
    total_z += zj;
  }
  require(std::fabs(total_z - 1.0) <= 1e-12, Errc::domain_error, "control factor: z must sum to 1");
  double s = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (counts[j] == 0) continue;
    const double bz = b * z[j];
    s += static_cast<double>(counts[j]) * std::log(bz) - rising_factorial_log(bz, counts[j]);
  }
  return s;
}

ControlPartition::ControlPartition(std::vector<double> cuts) : cuts_(std::move(cuts)) {
  for (std::size_t i = 0; i < cuts_.size(); ++i) {
    require(std::isfinite(cuts_[i]), Errc::domain_error, "control partition: cut points must be finite");
    require(i == 0 || cuts_[i] > cuts_[i - 1], Errc::invalid_argument,
            "control partition: cut points must be strictly increasing");
  }
}

std::size_t ControlPartition::cell_of(double r) const {
  return static_cast<std::size_t>(std::lower_bound(cuts_.begin(), cuts_.end(), r) - cuts_.begin());
}

std::vector<std::size_t> ControlPartition::counts(std::span<const double> residuals) const {
  std::vector<std::size_t> c(cells(), 0);
  for (double r : residuals) {
    require(!std::isnan(r), Errc::domain_error, "control partition: NaN residual");
    ++c[cell_of(r)];
  }
  return c;
}

}  // namespace npbayes
