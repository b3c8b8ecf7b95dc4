#include "npbayes/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "npbayes/error.hpp"

namespace npbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMinInterval = 1e-14;

std::size_t node_count(int depth) { return (std::size_t{1} << depth) - 1; }

void check_depth(int depth) {
  require(depth >= 1 && depth <= 20, Errc::domain_error, "pyramid depth must lie in 1..20");
}

std::size_t level_step(int depth, int level) { return std::size_t{1} << (depth - level); }

// Own prior term of node k: log h(q_k) - log mass(parent interval).
double node_log_prior(const Pyramid& pyr, const LevelDensity& h, std::size_t k) {
  const std::size_t step = level_step(pyr.depth(), node_level(pyr.depth(), k));
  const double lo = pyr.at(k - step);
  const double hi = pyr.at(k + step);
  const double q = pyr.at(k);
  if (!(q > lo && q < hi)) return kNegInf;
  return h.log_density(q) - std::log(h.mass(lo, hi));
}

std::size_t count_below(std::span<const double> sorted, double x) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

// Cell j = 1..2^m, [q_(j-1), q_j) with the last cell closed.
std::size_t cell_count(const Pyramid& pyr, std::span<const double> sorted, std::size_t j) {
  const std::size_t left = j == 1 ? 0 : count_below(sorted, pyr.at(j - 1));
  const std::size_t right = j == pyr.cells() ? sorted.size() : count_below(sorted, pyr.at(j));
  return right - left;
}

// Contribution of cell j to the log likelihood, without the constant parts.
double cell_log_term(const Pyramid& pyr, std::span<const double> sorted, std::size_t j,
                     PyramidLikelihood likelihood) {
  const auto count = static_cast<double>(cell_count(pyr, sorted, j));
  if (likelihood == PyramidLikelihood::substitute) return -std::lgamma(count + 1.0);
  const double width = pyr.at(j) - pyr.at(j - 1);
  if (!(width > 0.0)) return kNegInf;
  return count == 0.0 ? 0.0 : -count * std::log(width);
}

std::vector<double> sorted_unit_data(std::span<const double> data) {
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty()) {
    require(sorted.front() >= 0.0 && sorted.back() <= 1.0, Errc::domain_error,
            "pyramid likelihood: data must lie in [0,1]");
  }
  return sorted;
}

double reflect_into(double x, double lo, double hi) {
  const double w = hi - lo;
  double y = std::fmod(x - lo, 2.0 * w);
  if (y < 0.0) y += 2.0 * w;
  if (y > w) y = 2.0 * w - y;
  return lo + y;
}

}  // namespace

LevelDensity LevelDensity::uniform() { return LevelDensity(true, 1.0, 1.0); }

LevelDensity LevelDensity::beta(double alpha, double beta) {
  require(alpha > 0.0 && beta > 0.0 && std::isfinite(alpha) && std::isfinite(beta), Errc::domain_error,
          "LevelDensity::beta: parameters must be positive");
  return LevelDensity(alpha == 1.0 && beta == 1.0, alpha, beta);
}

double LevelDensity::log_density(double x) const {
  if (!(x > 0.0 && x < 1.0)) return kNegInf;
  if (uniform_) return 0.0;
  return (alpha_ - 1.0) * std::log(x) + (beta_ - 1.0) * std::log1p(-x) -
         (std::lgamma(alpha_) + std::lgamma(beta_) - std::lgamma(alpha_ + beta_));
}

double LevelDensity::mass(double lo, double hi) const {
  if (uniform_) return hi - lo;
  return reg_inc_beta(std::clamp(hi, 0.0, 1.0), alpha_, beta_) -
         reg_inc_beta(std::clamp(lo, 0.0, 1.0), alpha_, beta_);
}

double LevelDensity::sample(double lo, double hi, RngState& rng) const {
  if (!(hi - lo >= kMinInterval)) {
    fail(Errc::numerical_failure, "quantile pyramid: interval collapsed below 1e-14");
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    double x;
    if (uniform_) {
      x = lo + (hi - lo) * rng.uniform();
    } else {
      const double plo = reg_inc_beta(lo, alpha_, beta_);
      const double phi = reg_inc_beta(hi, alpha_, beta_);
      const double p = plo + (phi - plo) * rng.uniform();
      x = boost::math::ibeta_inv(alpha_, beta_, p);
    }
    if (x > lo && x < hi) return x;
  }
  fail(Errc::numerical_failure, "quantile pyramid: could not draw strictly inside the interval");
}

Pyramid::Pyramid(int depth, std::vector<double> values) : depth_(depth), values_(std::move(values)) {
  check_depth(depth);
  require(values_.size() == node_count(depth), Errc::invalid_argument,
          "Pyramid: expected 2^depth - 1 values");
}

double Pyramid::at(std::size_t k) const {
  if (k == 0) return 0.0;
  if (k == cells()) return 1.0;
  return values_[k - 1];
}

bool Pyramid::is_valid() const {
  double prev = 0.0;
  for (double v : values_) {
    if (!(v > prev)) return false;
    prev = v;
  }
  return prev < 1.0;
}

double Pyramid::quantile(double y) const {
  require(y >= 0.0 && y <= 1.0, Errc::domain_error, "Pyramid::quantile: level outside [0,1]");
  const double pos = y * static_cast<double>(cells());
  const auto k = std::min(static_cast<std::size_t>(pos), cells() - 1);
  const double frac = pos - static_cast<double>(k);
  return at(k) + frac * (at(k + 1) - at(k));
}

std::vector<std::size_t> tree_order(int depth) {
  check_depth(depth);
  std::vector<std::size_t> order;
  order.reserve(node_count(depth));
  for (int level = 1; level <= depth; ++level) {
    const std::size_t step = level_step(depth, level);
    for (std::size_t k = step; k < (std::size_t{1} << depth); k += 2 * step) order.push_back(k);
  }
  return order;
}

int node_level(int depth, std::size_t k) {
  require(k >= 1 && k <= node_count(depth), Errc::domain_error, "node_level: node out of range");
  int trailing = 0;
  while ((k & 1u) == 0) {
    k >>= 1;
    ++trailing;
  }
  return depth - trailing;
}

std::string node_label(int depth, std::size_t k) {
  const std::size_t denom = std::size_t{1} << depth;
  const std::size_t g = std::gcd(k, denom);
  return std::to_string(k / g) + "/" + std::to_string(denom / g);
}

Pyramid sample_prior(int depth, const LevelDensity& h, RngState& rng) {
  check_depth(depth);
  Pyramid pyr(depth, std::vector<double>(node_count(depth), 0.0));
  for (std::size_t k : tree_order(depth)) {
    const std::size_t step = level_step(depth, node_level(depth, k));
    pyr.set(k, h.sample(pyr.at(k - step), pyr.at(k + step), rng));
  }
  return pyr;
}

double prior_log_density(const Pyramid& pyr, const LevelDensity& h) {
  double total = 0.0;
  for (std::size_t k = 1; k <= pyr.nodes(); ++k) {
    const double term = node_log_prior(pyr, h, k);
    if (term == kNegInf) return kNegInf;
    total += term;
  }
  return total;
}

std::vector<std::size_t> cell_counts(const Pyramid& pyr, std::span<const double> sorted_data) {
  std::vector<std::size_t> counts(pyr.cells());
  for (std::size_t j = 1; j <= pyr.cells(); ++j) counts[j - 1] = cell_count(pyr, sorted_data, j);
  return counts;
}

double loglik_interp(const Pyramid& pyr, std::span<const double> data) {
  const auto sorted = sorted_unit_data(data);
  double total = 0.0;
  for (std::size_t j = 1; j <= pyr.cells(); ++j) {
    if (!(pyr.at(j) - pyr.at(j - 1) > 0.0)) return kNegInf;
    total += cell_log_term(pyr, sorted, j, PyramidLikelihood::interpolation);
  }
  return total;
}

double loglik_substitute(const Pyramid& pyr, std::span<const double> data) {
  const auto sorted = sorted_unit_data(data);
  const auto n = static_cast<double>(sorted.size());
  double total = std::lgamma(n + 1.0) - n * static_cast<double>(pyr.depth()) * std::log(2.0);
  for (std::size_t j = 1; j <= pyr.cells(); ++j) {
    total += cell_log_term(pyr, sorted, j, PyramidLikelihood::substitute);
  }
  return total;
}

PyramidChain posterior_sampler(int depth, const LevelDensity& h, std::span<const double> data,
                               PyramidLikelihood likelihood, const PyramidSamplerOptions& options,
                               RngState& rng) {
  check_depth(depth);
  require(options.iterations >= 1, Errc::domain_error, "pyramid sampler: iterations must be >= 1");
  require(options.thin >= 1, Errc::domain_error, "pyramid sampler: thin must be >= 1");
  require(options.proposal_scale > 0.0 && std::isfinite(options.proposal_scale), Errc::domain_error,
          "pyramid sampler: proposal scale must be positive");
  const auto sorted = sorted_unit_data(data);

  std::vector<double> start(node_count(depth));
  const double cells = static_cast<double>(node_count(depth) + 1);
  for (std::size_t k = 1; k <= start.size(); ++k) start[k - 1] = static_cast<double>(k) / cells;
  Pyramid state(depth, std::move(start));

  const auto order = tree_order(depth);
  PyramidChain chain;
  std::size_t proposals = 0;
  std::size_t accepted = 0;

  // A move of node k rescales its whole subtree affinely into the new
  // brackets, so upper nodes are not pinned by their finest neighbours.
  // Terms that change: prior terms of k and its descendants, and the cells
  // between k's two brackets.
  const auto subtree_log_target = [&](std::size_t k, std::size_t step) {
    double t = 0.0;
    for (std::size_t j = k - step + 1; j < k + step; ++j) t += node_log_prior(state, h, j);
    for (std::size_t j = k - step + 1; j <= k + step; ++j) t += cell_log_term(state, sorted, j, likelihood);
    return t;
  };

  std::vector<double> saved;
  for (std::size_t sweep = 1; sweep <= options.iterations; ++sweep) {
    for (std::size_t k : order) {
      const std::size_t step = level_step(depth, node_level(depth, k));
      const double lo = state.at(k - step);
      const double hi = state.at(k + step);
      const double current = state.at(k);
      const double half_width = options.proposal_scale * (hi - lo);
      const double proposal =
          reflect_into(current + half_width * (2.0 * rng.uniform() - 1.0), lo, hi);
      const double u = rng.uniform();
      ++proposals;
      if (!(proposal > lo && proposal < hi)) continue;
      const double left = (proposal - lo) / (current - lo);
      const double right = (hi - proposal) / (hi - current);
      const double before = subtree_log_target(k, step);
      saved.assign(state.values().begin() + static_cast<std::ptrdiff_t>(k - step),
                   state.values().begin() + static_cast<std::ptrdiff_t>(k + step - 1));
      for (std::size_t j = k - step + 1; j < k; ++j) state.set(j, lo + (state.at(j) - lo) * left);
      state.set(k, proposal);
      for (std::size_t j = k + 1; j < k + step; ++j) state.set(j, hi - (hi - state.at(j)) * right);
      bool ordered = true;
      for (std::size_t j = k - step + 1; j <= k + step && ordered; ++j) ordered = state.at(j) > state.at(j - 1);
      const double after = ordered ? subtree_log_target(k, step) : kNegInf;
      const double log_jacobian = static_cast<double>(step - 1) * (std::log(left) + std::log(right));
      if (after > kNegInf && std::log(u) < after - before + log_jacobian) {
        ++accepted;
      } else {
        for (std::size_t j = 0; j < saved.size(); ++j) state.set(k - step + 1 + j, saved[j]);
      }
    }
    if (sweep > options.burn_in && (sweep - options.burn_in) % options.thin == 0) {
      chain.iteration.push_back(sweep);
      chain.draws.push_back(state);
    }
  }
  chain.acceptance_rate = proposals ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
  return chain;
}

}  // namespace npbayes
