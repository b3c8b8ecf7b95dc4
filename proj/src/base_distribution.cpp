#include "npbayes/base_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "npbayes/error.hpp"

namespace npbayes {

namespace {

double empirical_cdf(const std::vector<double>& sorted, double x) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double empirical_quantile(const std::vector<double>& sorted, double p) {
  const double n = static_cast<double>(sorted.size());
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  auto k = static_cast<std::size_t>(std::ceil(p * n));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

}  // namespace

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double standard_normal_quantile(double p) {
  require(p >= 0.0 && p <= 1.0, Errc::domain_error, "normal quantile: p outside [0,1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

BaseDistribution BaseDistribution::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, Errc::domain_error,
          "uniform base: need finite lo < hi");
  return BaseDistribution(std::make_shared<const Storage>(Uniform{lo, hi}));
}

BaseDistribution BaseDistribution::normal(double mean, double sd) {
  require(std::isfinite(mean) && std::isfinite(sd) && sd > 0.0, Errc::domain_error,
          "normal base: need finite mean and sd > 0");
  return BaseDistribution(std::make_shared<const Storage>(Normal{mean, sd}));
}

BaseDistribution BaseDistribution::empirical(std::vector<double> points) {
  require(!points.empty(), Errc::invalid_argument, "empirical base: no points");
  for (double p : points) require(std::isfinite(p), Errc::domain_error, "empirical base: non-finite point");
  std::sort(points.begin(), points.end());
  return BaseDistribution(std::make_shared<const Storage>(Empirical{std::move(points)}));
}

BaseDistribution BaseDistribution::mixture(const BaseDistribution& component, double prior_mass,
                                           std::vector<double> atoms) {
  require(component.family() != Family::mixture, Errc::invalid_argument,
          "mixture base: component may not be a mixture");
  require(prior_mass > 0.0 && std::isfinite(prior_mass), Errc::domain_error,
          "mixture base: prior mass must be positive");
  for (double a : atoms) require(std::isfinite(a), Errc::domain_error, "mixture base: non-finite atom");
  std::sort(atoms.begin(), atoms.end());
  return BaseDistribution(std::make_shared<const Storage>(
      Mixture{std::make_shared<const BaseDistribution>(component), prior_mass, std::move(atoms)}));
}

BaseDistribution::Family BaseDistribution::family() const {
  return static_cast<Family>(impl_->index());
}

double BaseDistribution::component_weight() const {
  const auto* m = std::get_if<Mixture>(impl_.get());
  require(m != nullptr, Errc::invalid_argument, "component_weight: not a mixture");
  return m->prior_mass / (m->prior_mass + static_cast<double>(m->sorted_atoms.size()));
}

double BaseDistribution::cdf(double x) const {
  if (std::isnan(x)) fail(Errc::domain_error, "cdf: NaN argument");
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          if (x <= d.lo) return 0.0;
          if (x >= d.hi) return 1.0;
          return (x - d.lo) / (d.hi - d.lo);
        } else if constexpr (std::is_same_v<T, Normal>) {
          return standard_normal_cdf((x - d.mean) / d.sd);
        } else if constexpr (std::is_same_v<T, Empirical>) {
          return empirical_cdf(d.sorted, x);
        } else {
          const double w = component_weight();
          const double atoms = d.sorted_atoms.empty() ? 0.0 : empirical_cdf(d.sorted_atoms, x);
          return w * d.component->cdf(x) + (1.0 - w) * atoms;
        }
      },
      *impl_);
}

double BaseDistribution::quantile(double p) const {
  require(p >= 0.0 && p <= 1.0, Errc::domain_error, "quantile: p outside [0,1]");
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return d.lo + p * (d.hi - d.lo);
        } else if constexpr (std::is_same_v<T, Normal>) {
          return d.mean + d.sd * standard_normal_quantile(p);
        } else if constexpr (std::is_same_v<T, Empirical>) {
          return empirical_quantile(d.sorted, p);
        } else {
          if (d.sorted_atoms.empty()) return d.component->quantile(p);
          if (p == 0.0) return std::min(d.sorted_atoms.front(), d.component->quantile(0.0));
          if (p == 1.0) return std::max(d.sorted_atoms.back(), d.component->quantile(1.0));
          // Bisection for inf{x : cdf(x) >= p}, bracket grown until it holds.
          const double centre = d.component->quantile(0.5);
          double lo = std::min(d.sorted_atoms.front(), centre);
          double hi = std::max(d.sorted_atoms.back(), centre);
          while (cdf(lo) >= p) lo -= (hi - lo) + 1.0;
          while (cdf(hi) < p) hi += (hi - lo) + 1.0;
          for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (cdf(mid) >= p) hi = mid; else lo = mid;
          }
          return hi;
        }
      },
      *impl_);
}

double BaseDistribution::sample(RngState& rng) const {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return d.lo + (d.hi - d.lo) * rng.uniform();
        } else if constexpr (std::is_same_v<T, Normal>) {
          return d.mean + d.sd * sample_normal(rng);
        } else if constexpr (std::is_same_v<T, Empirical>) {
          return d.sorted[rng.uniform_index(d.sorted.size())];
        } else {
          if (rng.uniform() < component_weight()) return d.component->sample(rng);
          return d.sorted_atoms[rng.uniform_index(d.sorted_atoms.size())];
        }
      },
      *impl_);
}

double BaseDistribution::mean() const {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return 0.5 * (d.lo + d.hi);
        } else if constexpr (std::is_same_v<T, Normal>) {
          return d.mean;
        } else if constexpr (std::is_same_v<T, Empirical>) {
          double s = 0.0;
          for (double v : d.sorted) s += v;
          return s / static_cast<double>(d.sorted.size());
        } else {
          const double w = component_weight();
          double s = 0.0;
          for (double v : d.sorted_atoms) s += v;
          const double atoms = d.sorted_atoms.empty() ? 0.0 : s / static_cast<double>(d.sorted_atoms.size());
          return w * d.component->mean() + (1.0 - w) * atoms;
        }
      },
      *impl_);
}

std::optional<std::pair<double, double>> BaseDistribution::support() const {
  return std::visit(
      [&](const auto& d) -> std::optional<std::pair<double, double>> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return std::pair{d.lo, d.hi};
        } else if constexpr (std::is_same_v<T, Normal>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Empirical>) {
          return std::pair{d.sorted.front(), d.sorted.back()};
        } else {
          auto s = d.component->support();
          if (!s) return std::nullopt;
          if (!d.sorted_atoms.empty()) {
            s->first = std::min(s->first, d.sorted_atoms.front());
            s->second = std::max(s->second, d.sorted_atoms.back());
          }
          return s;
        }
      },
      *impl_);
}

bool BaseDistribution::is_continuous() const {
  const Family f = family();
  if (f == Family::uniform || f == Family::normal) return true;
  if (f == Family::mixture) return points().empty() && component().is_continuous();
  return false;
}

std::pair<double, double> BaseDistribution::uniform_bounds() const {
  const auto* u = std::get_if<Uniform>(impl_.get());
  require(u != nullptr, Errc::invalid_argument, "uniform_bounds: not a uniform base");
  return {u->lo, u->hi};
}

std::pair<double, double> BaseDistribution::normal_params() const {
  const auto* n = std::get_if<Normal>(impl_.get());
  require(n != nullptr, Errc::invalid_argument, "normal_params: not a normal base");
  return {n->mean, n->sd};
}

const std::vector<double>& BaseDistribution::points() const {
  if (const auto* e = std::get_if<Empirical>(impl_.get())) return e->sorted;
  if (const auto* m = std::get_if<Mixture>(impl_.get())) return m->sorted_atoms;
  fail(Errc::invalid_argument, "points: base has no point list");
}

const BaseDistribution& BaseDistribution::component() const {
  const auto* m = std::get_if<Mixture>(impl_.get());
  require(m != nullptr, Errc::invalid_argument, "component: not a mixture");
  return *m->component;
}

double BaseDistribution::prior_mass() const {
  const auto* m = std::get_if<Mixture>(impl_.get());
  require(m != nullptr, Errc::invalid_argument, "prior_mass: not a mixture");
  return m->prior_mass;
}

bool operator==(const BaseDistribution& a, const BaseDistribution& b) {
  if (a.impl_ == b.impl_) return true;
  if (a.family() != b.family()) return false;
  switch (a.family()) {
    case BaseDistribution::Family::uniform:
      return a.uniform_bounds() == b.uniform_bounds();
    case BaseDistribution::Family::normal:
      return a.normal_params() == b.normal_params();
    case BaseDistribution::Family::empirical:
      return a.points() == b.points();
    case BaseDistribution::Family::mixture:
      return a.prior_mass() == b.prior_mass() && a.points() == b.points() &&
             a.component() == b.component();
  }
  return false;
}

}  // namespace npbayes
