#include "npbayes/means.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/multiprecision/cpp_int.hpp>

#include "npbayes/error.hpp"
#include "numerics.hpp"

namespace npbayes {

namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr int kMaxExactOrder = 40;

template <class T>
struct Neumaier {
  T sum{0};
  T correction{0};
  void add(const T& x) {
    const T t = sum + x;
    if (abs_value(sum) >= abs_value(x)) {
      correction += (sum - t) + x;
    } else {
      correction += (x - t) + sum;
    }
    sum = t;
  }
  T value() const { return sum + correction; }
  static T abs_value(const T& v) { return v < T(0) ? T(-v) : v; }
};

// E[B^i (1-B)^j] for B ~ Beta(a, b), by the rising-product formula.
template <class T>
T beta_product_moment(const T& a, const T& b, int i, int j) {
  T num(1);
  T den(1);
  for (int r = 0; r < i; ++r) num *= a + T(r);
  for (int s = 0; s < j; ++s) num *= b + T(s);
  for (int t = 0; t < i + j; ++t) den *= a + b + T(t);
  return num / den;
}

std::vector<std::vector<Rational>> binomials(int p_max) {
  std::vector<std::vector<Rational>> c(p_max + 1);
  for (int p = 0; p <= p_max; ++p) {
    c[p].assign(p + 1, Rational(1));
    for (int j = 1; j < p; ++j) c[p][j] = c[p - 1][j - 1] + c[p - 1][j];
  }
  return c;
}

std::vector<Rational> exact_base_central(const BaseMomentSpec& base, int p_max) {
  std::vector<Rational> mu(p_max + 1, Rational(0));
  mu[0] = 1;
  switch (base.source()) {
    case BaseMomentSpec::Source::uniform: {
      const Rational half = (Rational(base.source_param(1)) - Rational(base.source_param(0))) / 2;
      Rational pow = half * half;
      for (int p = 2; p <= p_max; p += 2) {
        mu[p] = pow / (p + 1);
        pow *= half * half;
      }
      break;
    }
    case BaseMomentSpec::Source::normal: {
      const Rational var = Rational(base.source_param(1)) * Rational(base.source_param(1));
      Rational m = var;  // (p-1)!! sd^p
      for (int p = 2; p <= p_max; p += 2) {
        mu[p] = m;
        m *= var * (p + 1);
      }
      break;
    }
    case BaseMomentSpec::Source::point_mass:
      break;
    case BaseMomentSpec::Source::general:
      fail(Errc::unsupported, "central_moments: exact arithmetic needs a rational moment source");
  }
  return mu;
}

std::vector<double> recursion_exact(const BaseMomentSpec& base, const StickMomentTable& sticks,
                                    int p_max) {
  const Rational a(sticks.stick_a());
  const Rational b(sticks.stick_b());
  const auto mu = exact_base_central(base, p_max);
  const auto binom = binomials(p_max);
  std::vector<Rational> m(p_max + 1, Rational(0));
  m[0] = 1;
  for (int p = 2; p <= p_max; ++p) {
    Rational rhs(0);
    for (int j = 0; j < p; ++j) {
      if (mu[p - j] == 0 || m[j] == 0) continue;
      rhs += binom[p][j] * mu[p - j] * beta_product_moment(a, b, p - j, j) * m[j];
    }
    const Rational lead = Rational(1) - beta_product_moment(a, b, 0, p);
    if (lead <= 0) fail(Errc::numerical_failure, "central_moments: degenerate stick law (B == 0)");
    m[p] = rhs / lead;
  }
  std::vector<double> out(p_max + 1);
  for (int p = 0; p <= p_max; ++p) out[p] = m[p].convert_to<double>();
  return out;
}

std::vector<double> recursion_floating(const BaseMomentSpec& base, const StickMomentTable& sticks,
                                       int p_max) {
  std::vector<long double> binom_row(p_max + 1);
  std::vector<long double> m(p_max + 1, 0.0L);
  m[0] = 1.0L;
  for (int p = 2; p <= p_max; ++p) {
    // C(p, j) by the multiplicative formula.
    binom_row[0] = 1.0L;
    for (int j = 1; j <= p; ++j) binom_row[j] = binom_row[j - 1] * (p - j + 1) / j;
    Neumaier<long double> rhs;
    for (int j = 0; j < p; ++j) {
      rhs.add(binom_row[j] * static_cast<long double>(base.central(p - j)) *
              static_cast<long double>(sticks(p - j, j)) * m[j]);
    }
    const long double lead = 1.0L - static_cast<long double>(sticks(0, p));
    if (!(lead > 0.0L)) fail(Errc::numerical_failure, "central_moments: degenerate stick law (B == 0)");
    m[p] = rhs.value() / lead;
  }
  std::vector<double> out(p_max + 1);
  for (int p = 0; p <= p_max; ++p) out[p] = static_cast<double>(m[p]);
  return out;
}

// Integral of f against P0 with an n-point Gauss rule.
double gauss_expectation(const BaseDistribution& base, const std::function<double(double)>& f,
                         std::size_t n) {
  using Family = BaseDistribution::Family;
  switch (base.family()) {
    case Family::uniform: {
      const auto [lo, hi] = base.uniform_bounds();
      const auto rule = detail::gauss_legendre(n);
      const double mid = 0.5 * (lo + hi);
      const double half = 0.5 * (hi - lo);
      detail::CompensatedSum s;
      for (std::size_t i = 0; i < n; ++i) s.add(rule.weights[i] * f(mid + half * rule.nodes[i]));
      return 0.5 * s.value();
    }
    case Family::normal: {
      const auto [mu, sd] = base.normal_params();
      const auto rule = detail::gauss_hermite(n);
      detail::CompensatedSum s;
      for (std::size_t i = 0; i < n; ++i) {
        s.add(rule.weights[i] * f(mu + std::numbers::sqrt2 * sd * rule.nodes[i]));
      }
      return s.value() / std::sqrt(std::numbers::pi);
    }
    case Family::empirical: {
      detail::CompensatedSum s;
      for (double x : base.points()) s.add(f(x));
      return s.value() / static_cast<double>(base.points().size());
    }
    case Family::mixture: {
      const double w = base.component_weight();
      double atoms = 0.0;
      if (!base.points().empty()) {
        detail::CompensatedSum s;
        for (double x : base.points()) s.add(f(x));
        atoms = s.value() / static_cast<double>(base.points().size());
      }
      return w * gauss_expectation(base.component(), f, n) + (1.0 - w) * atoms;
    }
  }
  return 0.0;
}

// Adaptive fallback for the normal family when the Hermite rule has not converged.
double adaptive_normal_expectation(const BaseDistribution& base, const std::function<double(double)>& f) {
  const auto [mu, sd] = base.normal_params();
  const auto integrand = [&](double z) {
    return f(mu + sd * z) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  };
  const auto r = detail::integrate(integrand, -std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity(), 1e-13);
  if (r.error > 1e-10) fail(Errc::numerical_failure, "transform_rhs: quadrature did not converge");
  return r.value;
}

bool contains_normal(const BaseDistribution& base) {
  if (base.family() == BaseDistribution::Family::normal) return true;
  return base.family() == BaseDistribution::Family::mixture &&
         base.component().family() == BaseDistribution::Family::normal;
}

}  // namespace

StickMomentTable::StickMomentTable(double a, double b, int p_max) : a_(a), b_(b), p_max_(p_max) {
  require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b), Errc::domain_error,
          "stick_moments: stick parameters must be positive");
  require(p_max >= 2, Errc::domain_error, "stick_moments: p_max must be at least 2");
  const int n = p_max + 1;
  entries_.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i <= p_max; ++i) {
    for (int j = 0; i + j <= p_max; ++j) {
      // Log space keeps large orders from overflowing the rising products.
      double log_value = 0.0;
      for (int r = 0; r < i; ++r) log_value += std::log(a + r);
      for (int s = 0; s < j; ++s) log_value += std::log(b + s);
      for (int t = 0; t < i + j; ++t) log_value -= std::log(a + b + t);
      entries_[static_cast<std::size_t>(i) * n + j] = std::exp(log_value);
    }
  }
}

double StickMomentTable::operator()(int i, int j) const {
  require(i >= 0 && j >= 0 && i + j <= p_max_, Errc::domain_error,
          "StickMomentTable: index outside the table");
  return entries_[static_cast<std::size_t>(i) * (p_max_ + 1) + j];
}

StickMomentTable stick_moments(double a, double b, int p_max) { return StickMomentTable(a, b, p_max); }

BaseMomentSpec BaseMomentSpec::uniform(double lo, double hi, int p_max) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, Errc::domain_error,
          "BaseMomentSpec::uniform: need lo < hi");
  require(p_max >= 2, Errc::domain_error, "BaseMomentSpec: p_max must be at least 2");
  BaseMomentSpec s;
  s.theta0_ = 0.5 * (lo + hi);
  s.central_.assign(p_max + 1, 0.0);
  s.central_[0] = 1.0;
  const double half = 0.5 * (hi - lo);
  for (int p = 2; p <= p_max; p += 2) s.central_[p] = std::pow(half, p) / (p + 1);
  s.lo_ = lo;
  s.hi_ = hi;
  s.source_ = Source::uniform;
  s.params_[0] = lo;
  s.params_[1] = hi;
  return s;
}

BaseMomentSpec BaseMomentSpec::normal(double mean, double sd, int p_max) {
  require(std::isfinite(mean) && sd > 0.0 && std::isfinite(sd), Errc::domain_error,
          "BaseMomentSpec::normal: need sd > 0");
  require(p_max >= 2, Errc::domain_error, "BaseMomentSpec: p_max must be at least 2");
  BaseMomentSpec s;
  s.theta0_ = mean;
  s.central_.assign(p_max + 1, 0.0);
  s.central_[0] = 1.0;
  double m = sd * sd;
  for (int p = 2; p <= p_max; p += 2) {
    s.central_[p] = m;
    m *= sd * sd * (p + 1);
  }
  s.lo_ = -std::numeric_limits<double>::infinity();
  s.hi_ = std::numeric_limits<double>::infinity();
  s.source_ = Source::normal;
  s.params_[0] = mean;
  s.params_[1] = sd;
  return s;
}

BaseMomentSpec BaseMomentSpec::point_mass(double c, int p_max) {
  require(std::isfinite(c), Errc::domain_error, "BaseMomentSpec::point_mass: non-finite value");
  require(p_max >= 2, Errc::domain_error, "BaseMomentSpec: p_max must be at least 2");
  BaseMomentSpec s;
  s.theta0_ = c;
  s.central_.assign(p_max + 1, 0.0);
  s.central_[0] = 1.0;
  s.lo_ = s.hi_ = c;
  s.source_ = Source::point_mass;
  s.params_[0] = c;
  return s;
}

BaseMomentSpec BaseMomentSpec::from_central(double theta0, std::vector<double> central, double lo,
                                            double hi) {
  require(central.size() >= 3, Errc::invalid_argument, "BaseMomentSpec: need moments up to order 2");
  require(central[0] == 1.0 && central[1] == 0.0, Errc::invalid_argument,
          "BaseMomentSpec: central[0] must be 1 and central[1] 0");
  for (std::size_t p = 2; p < central.size(); p += 2) {
    require(central[p] >= 0.0, Errc::domain_error, "BaseMomentSpec: negative even central moment");
  }
  require(lo <= theta0 && theta0 <= hi, Errc::domain_error, "BaseMomentSpec: mean outside support");
  BaseMomentSpec s;
  s.theta0_ = theta0;
  s.central_ = std::move(central);
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

double BaseMomentSpec::central(int p) const {
  require(p >= 0 && p <= p_max(), Errc::domain_error, "BaseMomentSpec: order not available");
  return central_[p];
}

std::vector<double> central_moments(const BaseMomentSpec& base, const StickMomentTable& sticks,
                                    int p_max, MomentArithmetic mode) {
  require(p_max >= 2, Errc::domain_error, "central_moments: p_max must be at least 2");
  require(p_max <= base.p_max(), Errc::domain_error, "central_moments: base moments too short");
  require(p_max <= sticks.p_max(), Errc::domain_error, "central_moments: stick table too short");
  const bool rational_source = base.source() != BaseMomentSpec::Source::general;
  if (mode == MomentArithmetic::exact ||
      (mode == MomentArithmetic::automatic && rational_source && p_max <= kMaxExactOrder)) {
    return recursion_exact(base, sticks, p_max);
  }
  return recursion_floating(base, sticks, p_max);
}

Integrand Integrand::identity() {
  Integrand g;
  g.kind_ = Kind::identity;
  g.name_ = "identity";
  return g;
}

Integrand Integrand::constant(double c) {
  require(std::isfinite(c), Errc::domain_error, "Integrand::constant: non-finite value");
  Integrand g;
  g.kind_ = Kind::constant;
  g.param_ = c;
  g.name_ = "constant";
  return g;
}

Integrand Integrand::power(double k) {
  require(std::isfinite(k) && k > 0.0, Errc::domain_error, "Integrand::power: exponent must be positive");
  Integrand g;
  g.kind_ = Kind::power;
  g.param_ = k;
  g.name_ = "power";
  return g;
}

Integrand Integrand::custom(std::function<double(double)> fn, std::string name) {
  require(static_cast<bool>(fn), Errc::invalid_argument, "Integrand::custom: empty function");
  Integrand g;
  g.kind_ = Kind::custom;
  g.fn_ = std::move(fn);
  g.name_ = std::move(name);
  return g;
}

double Integrand::operator()(double x) const {
  switch (kind_) {
    case Kind::identity:
      return x;
    case Kind::constant:
      return param_;
    case Kind::power:
      return std::pow(x, param_);
    case Kind::custom:
      return fn_(x);
  }
  return x;
}

bool TransformReport::within(double n_se) const {
  return std::fabs(lhs_mc - rhs_exact) <= n_se * mc_se;
}

double transform_rhs(double u, const DPParams& params, const Integrand& g, std::size_t quad_points) {
  require(u > 0.0 && std::isfinite(u), Errc::domain_error, "transform_rhs: u must be positive");
  require(quad_points >= 2, Errc::domain_error, "transform_rhs: need at least two quadrature points");
  const auto f = [&](double x) {
    const double gx = g(x);
    if (!(gx >= 0.0) || !std::isfinite(gx)) {
      fail(Errc::numerical_failure, "transform_rhs: g must be finite and nonnegative on the support");
    }
    return std::log1p(u * gx);
  };
  const double coarse = gauss_expectation(params.base(), f, quad_points);
  const double fine = gauss_expectation(params.base(), f, 2 * quad_points);
  double integral = fine;
  if (std::fabs(fine - coarse) > 1e-11 * std::max(1.0, std::fabs(fine))) {
    if (params.base().family() == BaseDistribution::Family::normal) {
      integral = adaptive_normal_expectation(params.base(), f);
    } else if (contains_normal(params.base())) {
      const auto& base = params.base();
      double atoms = 0.0;
      for (double x : base.points()) atoms += f(x);
      if (!base.points().empty()) atoms /= static_cast<double>(base.points().size());
      integral = base.component_weight() * adaptive_normal_expectation(base.component(), f) +
                 (1.0 - base.component_weight()) * atoms;
    } else {
      fail(Errc::numerical_failure, "transform_rhs: quadrature did not converge");
    }
  }
  return std::exp(-params.concentration() * integral);
}

TransformReport transform_identity_check(double u, const DPParams& params, const Integrand& g,
                                         std::size_t n_sim, std::size_t quad_points, RngState& rng,
                                         double truncation_eps) {
  require(params.is_dirichlet(), Errc::unsupported,
          "transform_identity_check: the identity holds for the Dirichlet stick law only");
  require(n_sim >= 2, Errc::domain_error, "transform_identity_check: need at least two simulations");
  TransformReport report;
  report.u = u;
  report.rhs_exact = transform_rhs(u, params, g, quad_points);
  const double b = params.concentration();
  const auto gfun = [&g](double x) { return g(x); };
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n_sim; ++k) {
    const AtomicMeasure p = stick_breaking_sample(params, truncation_eps, rng);
    const double theta = p.integrate(gfun);
    const double v = std::exp(-b * std::log1p(u * theta));
    // Welford update
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(n_sim - 1);
  report.lhs_mc = mean;
  report.mc_se = std::sqrt(var / static_cast<double>(n_sim));
  return report;
}

VariateSampler transformed_sampler(const BaseDistribution& base, const Integrand& g) {
  return [base, g](RngState& rng) { return g(base.sample(rng)); };
}

std::vector<double> stochastic_chain(double stick_a, double stick_b, const VariateSampler& y,
                                     std::size_t steps, std::size_t burn_in, RngState& rng) {
  require(stick_a > 0.0 && stick_b > 0.0, Errc::domain_error,
          "stochastic_chain: stick parameters must be positive");
  require(steps > burn_in, Errc::domain_error, "stochastic_chain: steps must exceed burn_in");
  require(static_cast<bool>(y), Errc::invalid_argument, "stochastic_chain: no variate sampler");
  std::vector<double> out;
  out.reserve(steps - burn_in);
  double theta = y(rng);
  for (std::size_t s = 1; s <= steps; ++s) {
    const double stick = sample_beta(stick_a, stick_b, rng);
    const double fresh = y(rng);
    // Convex combination; stays inside the hull of the Y support.
    theta = stick * fresh + (1.0 - stick) * theta;
    if (s > burn_in) out.push_back(theta);
  }
  return out;
}

void affine_correct(std::span<double> samples, double target_mean, double target_variance) {
  require(samples.size() >= 2, Errc::domain_error, "affine_correct: need at least two samples");
  require(target_variance >= 0.0, Errc::domain_error, "affine_correct: negative target variance");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= static_cast<double>(samples.size());
  const double scale = var > 0.0 ? std::sqrt(target_variance / var) : 0.0;
  for (double& v : samples) v = target_mean + scale * (v - mean);
}

std::vector<double> empirical_central_moments(std::span<const double> samples, double centre,
                                              int p_max) {
  require(!samples.empty(), Errc::domain_error, "empirical_central_moments: no samples");
  require(p_max >= 0, Errc::domain_error, "empirical_central_moments: negative order");
  std::vector<detail::CompensatedSum> sums(p_max + 1);
  for (double v : samples) {
    const double d = v - centre;
    double pw = 1.0;
    for (int p = 0; p <= p_max; ++p) {
      sums[p].add(pw);
      pw *= d;
    }
  }
  std::vector<double> out(p_max + 1);
  for (int p = 0; p <= p_max; ++p) out[p] = sums[p].value() / static_cast<double>(samples.size());
  return out;
}

}  // namespace npbayes
