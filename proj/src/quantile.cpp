#include "npbayes/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "npbayes/error.hpp"
#include "npbayes/randkit.hpp"
#include "numerics.hpp"

namespace npbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Beta(a, c) cdf extended to a == 0 (point mass at 0) and c == 0 (point mass at 1).
double beta_cdf_ext(double x, double a, double c) {
  if (a <= 0.0 && c <= 0.0) fail(Errc::domain_error, "beta_cdf_ext: both parameters vanish");
  if (a <= 0.0) return 1.0;
  if (c <= 0.0) return x >= 1.0 ? 1.0 : 0.0;
  return reg_inc_beta(x, a, c);
}

void check_level(double y) {
  require(y > 0.0 && y < 1.0, Errc::domain_error, "quantile level y must lie in (0,1)");
}

void check_closed_level(double y) {
  require(y >= 0.0 && y <= 1.0, Errc::domain_error, "quantile level y must lie in [0,1]");
}

}  // namespace

SortedSample SortedSample::from_values(std::vector<double> values) {
  require(!values.empty(), Errc::invalid_argument, "SortedSample: no data");
  for (double v : values) require(std::isfinite(v), Errc::domain_error, "SortedSample: non-finite value");
  std::sort(values.begin(), values.end());
  for (std::size_t i = 1; i < values.size(); ++i) {
    require(values[i] > values[i - 1], Errc::invalid_argument, "SortedSample: tied data points");
  }
  return SortedSample(std::move(values));
}

double prior_quantile_cdf(double y, double x, double b, const BaseDistribution& f0) {
  check_level(y);
  require(b > 0.0 && std::isfinite(b), Errc::domain_error, "prior_quantile_cdf: b must be positive");
  const double f = f0.cdf(x);
  if (f <= 0.0) return 0.0;
  if (f >= 1.0) return 1.0;
  return reg_inc_beta(1.0 - y, b * (1.0 - f), b * f);
}

QuantilePosteriorLaw::QuantilePosteriorLaw(double y, std::span<const double> sorted_data, double b,
                                           BaseDistribution f0)
    : y_(y), b_(b), data_(sorted_data.begin(), sorted_data.end()), f0_(std::move(f0)) {
  check_level(y);
  require(b >= 0.0 && std::isfinite(b), Errc::domain_error, "posterior quantile law: b must be >= 0");
  require(b > 0.0 || !data_.empty(), Errc::domain_error,
          "posterior quantile law: b = 0 needs at least one data point");
  for (std::size_t i = 1; i < data_.size(); ++i) {
    require(data_[i] > data_[i - 1], Errc::invalid_argument,
            "posterior quantile law: data must be strictly increasing");
  }
  atoms_.reserve(data_.size());
  for (std::size_t i = 1; i <= data_.size(); ++i) {
    const double x = data_[i - 1];
    // Difference of the two Beta cdfs on either side of x_(i).
    atoms_.push_back({x, segment_cdf(i, x) - segment_cdf(i - 1, x)});
  }
}

double QuantilePosteriorLaw::segment_cdf(std::size_t i, double x) const {
  const double n = static_cast<double>(data_.size());
  const double f = b_ > 0.0 ? f0_.cdf(x) : 0.0;
  const double fbar = b_ > 0.0 ? 1.0 - f : 0.0;
  const double di = static_cast<double>(i);
  return beta_cdf_ext(1.0 - y_, b_ * fbar + n - di, b_ * f + di);
}

std::size_t QuantilePosteriorLaw::window_of(double x) const {
  return static_cast<std::size_t>(std::upper_bound(data_.begin(), data_.end(), x) - data_.begin());
}

double QuantilePosteriorLaw::cdf(double x) const {
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  return segment_cdf(window_of(x), x);
}

double QuantilePosteriorLaw::cdf_left(double x) const {
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  const auto i = static_cast<std::size_t>(std::lower_bound(data_.begin(), data_.end(), x) - data_.begin());
  return segment_cdf(i, x);
}

double QuantilePosteriorLaw::window_mass(std::size_t i) const {
  const std::size_t n = data_.size();
  require(i <= n, Errc::domain_error, "window_mass: window index out of range");
  if (n == 0) return 1.0;
  const double left = i == 0 ? 0.0 : segment_cdf(i, data_[i - 1]);
  const double right = i == n ? 1.0 : segment_cdf(i, data_[i]);
  return right - left;
}

double QuantilePosteriorLaw::continuous_mass() const {
  detail::CompensatedSum s;
  for (std::size_t i = 0; i <= data_.size(); ++i) s.add(window_mass(i));
  return s.value();
}

double QuantilePosteriorLaw::mean() const {
  // E Q = c + int_c^inf (1 - H) - int_-inf^c H, split at every point where H
  // can jump so that each piece is smooth.
  std::vector<double> breaks(data_.begin(), data_.end());
  const auto family = f0_.family();
  if (family == BaseDistribution::Family::empirical || family == BaseDistribution::Family::mixture) {
    breaks.insert(breaks.end(), f0_.points().begin(), f0_.points().end());
  }
  const auto support = f0_.support();
  double lo = -kInf;
  double hi = kInf;
  if (support) {
    lo = support->first;
    hi = support->second;
  }
  if (!data_.empty()) {
    lo = std::min(lo, data_.front());
    hi = std::max(hi, data_.back());
  }
  if (b_ == 0.0) {
    lo = data_.front();
    hi = data_.back();
  }
  if (support || b_ == 0.0) {
    breaks.push_back(lo);
    breaks.push_back(hi);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const double centre = data_.empty() ? f0_.quantile(0.5) : data_.front();
  if (breaks.empty() || centre < breaks.front()) breaks.insert(breaks.begin(), centre);

  constexpr double kTol = 1e-8;
  double total = centre;
  double worst_error = 0.0;
  const auto below = [this](double x) { return cdf(x); };
  const auto above = [this](double x) { return 1.0 - cdf(x); };

  // Left tail and pieces below the centre.
  if (lo < breaks.front()) {
    const auto r = detail::integrate(below, lo, breaks.front(), kTol);
    total -= r.value;
    worst_error = std::max(worst_error, r.error);
  }
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k];
    const double c = breaks[k + 1];
    if (c <= centre) {
      const auto r = detail::integrate(below, a, c, kTol);
      total -= r.value;
      worst_error = std::max(worst_error, r.error);
    } else if (a >= centre) {
      const auto r = detail::integrate(above, a, c, kTol);
      total += r.value;
      worst_error = std::max(worst_error, r.error);
    } else {
      const auto r1 = detail::integrate(below, a, centre, kTol);
      const auto r2 = detail::integrate(above, centre, c, kTol);
      total += r2.value - r1.value;
      worst_error = std::max({worst_error, r1.error, r2.error});
    }
  }
  if (hi > breaks.back()) {
    const auto r = detail::integrate(above, breaks.back(), hi, kTol);
    total += r.value;
    worst_error = std::max(worst_error, r.error);
  }
  if (!std::isfinite(total) || worst_error > 1e-6) {
    fail(Errc::numerical_failure, "quantile posterior mean: integral did not converge (heavy tails?)");
  }
  return total;
}

QuantilePosteriorLaw posterior_quantile_law(double y, const SortedSample& data, double b,
                                            const BaseDistribution& f0) {
  return QuantilePosteriorLaw(y, data.values(), b, f0);
}

std::vector<double> noninf_point_masses(double y, std::size_t n) {
  check_closed_level(y);
  require(n >= 1, Errc::domain_error, "noninf_point_masses: n must be at least 1");
  std::vector<double> p(n, 0.0);
  if (y == 0.0) {
    p.front() = 1.0;
    return p;
  }
  if (y == 1.0) {
    p.back() = 1.0;
    return p;
  }
  const double log_y = std::log(y);
  const double log_1my = std::log1p(-y);
  const double lg_top = log_gamma(static_cast<double>(n));
  for (std::size_t i = 1; i <= n; ++i) {
    const double di = static_cast<double>(i);
    const double log_choose = lg_top - log_gamma(di) - log_gamma(static_cast<double>(n) - di + 1.0);
    p[i - 1] = std::exp(log_choose + (di - 1.0) * log_y + (static_cast<double>(n) - di) * log_1my);
  }
  return p;
}

double bernstein_quantile(double y, const SortedSample& data) {
  const auto p = noninf_point_masses(y, data.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * data[i];
  return s;
}

double bernstein_quantile_derivative(double y, const SortedSample& data) {
  const std::size_t n = data.size();
  if (n < 2) {
    check_closed_level(y);
    return 0.0;
  }
  // Degree n-2 Bernstein weights on the forward differences.
  const auto p = noninf_point_masses(y, n - 1);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) s += p[k] * (data[k + 1] - data[k]);
  return static_cast<double>(n - 1) * s;
}

double quantile_posterior_mean(double y, const SortedSample& data, double b, const BaseDistribution& f0) {
  require(b > 0.0, Errc::domain_error, "quantile_posterior_mean: b must be positive");
  return posterior_quantile_law(y, data, b, f0).mean();
}

double prior_quantile_mean(double y, double b, const BaseDistribution& f0) {
  require(b > 0.0, Errc::domain_error, "prior_quantile_mean: b must be positive");
  return QuantilePosteriorLaw(y, {}, b, f0).mean();
}

AutomaticDensity::AutomaticDensity(SortedSample data) : data_(std::move(data)) {
  require(data_.size() >= 3, Errc::invalid_argument, "automatic density: needs at least three points");
}

double AutomaticDensity::cdf(double x) const {
  if (x <= data_.front()) return 0.0;
  if (x >= data_.back()) return 1.0;
  // Qhat is strictly increasing on [0,1] for distinct data.
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (bernstein_quantile(mid, data_) < x) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double AutomaticDensity::operator()(double x) const {
  if (x < data_.front() || x > data_.back()) return 0.0;
  return 1.0 / bernstein_quantile_derivative(cdf(x), data_);
}

AutomaticDensity automatic_density(const SortedSample& data) { return AutomaticDensity(data); }

}  // namespace npbayes
