#include "npbayes/localreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "npbayes/error.hpp"

namespace npbayes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPrecisionFloor = 1e-8;

void check_bandwidth(double h) {
  require(h > 0.0 && std::isfinite(h), Errc::domain_error, "bandwidth must be positive");
}

struct WindowSums {
  double s0 = 0.0;
  double sy = 0.0;
};

WindowSums window_sums(double x, const RegressionData& data, double h, Kernel kernel) {
  WindowSums w;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double k = kernel_scaled(kernel, (data.x[i] - x) / h);
    if (k == 0.0) continue;
    w.s0 += k;
    w.sy += k * data.y[i];
  }
  return w;
}

std::array<std::array<double, 2>, 2> inverse2(const std::array<std::array<double, 2>, 2>& m) {
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  require(det != 0.0 && std::isfinite(det), Errc::numerical_failure, "singular 2x2 system");
  return {{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
}

using Mat2 = std::array<std::array<double, 2>, 2>;

Mat2 mul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

}  // namespace

double kernel_value(Kernel k, double u) {
  if (!(std::fabs(u) <= 0.5)) return 0.0;
  switch (k) {
    case Kernel::uniform:
      return 1.0;
    case Kernel::epanechnikov:
      return 1.5 * (1.0 - 4.0 * u * u);
    case Kernel::triangular:
      return 2.0 * (1.0 - 2.0 * std::fabs(u));
    case Kernel::biweight: {
      const double t = 1.0 - 4.0 * u * u;
      return 15.0 / 8.0 * t * t;
    }
  }
  fail(Errc::invalid_argument, "unknown kernel");
}

double kernel_scaled(Kernel k, double u) { return kernel_value(k, u) / kernel_value(k, 0.0); }

RegressionData::RegressionData(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)) {
  require(!x.empty(), Errc::invalid_argument, "regression data: need at least one pair");
  require(x.size() == y.size(), Errc::invalid_argument, "regression data: x and y lengths differ");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(std::isfinite(x[i]) && std::isfinite(y[i]), Errc::domain_error, "regression data: non-finite value");
  }
}

CurveSpec CurveSpec::constant(double c) {
  require(std::isfinite(c), Errc::domain_error, "curve: constant must be finite");
  CurveSpec s;
  s.a_ = c;
  return s;
}

CurveSpec CurveSpec::linear(double xi0, double xi1) {
  require(std::isfinite(xi0) && std::isfinite(xi1), Errc::domain_error, "curve: coefficients must be finite");
  CurveSpec s;
  s.kind_ = 1;
  s.a_ = xi0;
  s.b_ = xi1;
  return s;
}

CurveSpec CurveSpec::tabulated(std::vector<double> xs, std::vector<double> values) {
  require(!xs.empty() && xs.size() == values.size(), Errc::invalid_argument,
          "curve: table needs matching nonempty x and value lists");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(std::isfinite(xs[i]) && std::isfinite(values[i]), Errc::domain_error, "curve: non-finite table entry");
    require(i == 0 || xs[i] > xs[i - 1], Errc::invalid_argument, "curve: table x must be strictly increasing");
  }
  CurveSpec s;
  s.kind_ = 2;
  s.xs_ = std::move(xs);
  s.values_ = std::move(values);
  return s;
}

double CurveSpec::operator()(double x) const {
  switch (kind_) {
    case 0:
      return a_;
    case 1:
      return a_ + b_ * x;
    default:
      break;
  }
  if (x <= xs_.front()) return values_.front();
  if (x >= xs_.back()) return values_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const auto j = static_cast<std::size_t>(it - xs_.begin());
  const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
  return values_[j - 1] + t * (values_[j] - values_[j - 1]);
}

double CurveSpec::min_value() const {
  switch (kind_) {
    case 0:
      return a_;
    case 1:
      return b_ == 0.0 ? a_ : -std::numeric_limits<double>::infinity();
    default:
      return *std::min_element(values_.begin(), values_.end());
  }
}

void LocalPrior::validate() const {
  require(sigma > 0.0 && std::isfinite(sigma), Errc::domain_error, "local prior: sigma must be positive");
  require(w0.min_value() >= 0.0, Errc::domain_error, "local prior: w0 must be nonnegative everywhere");
}

KernelWeights kernel_weights(double x, const RegressionData& data, double h, Kernel kernel) {
  check_bandwidth(h);
  KernelWeights out;
  out.weights.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.weights[i] = kernel_scaled(kernel, (data.x[i] - x) / h);
    out.s0 += out.weights[i];
  }
  return out;
}

double kernel_density(double x, std::span<const double> xs, double h, Kernel kernel) {
  check_bandwidth(h);
  require(!xs.empty(), Errc::invalid_argument, "kernel_density: empty sample");
  double s = 0.0;
  for (double xi : xs) s += kernel_value(kernel, (xi - x) / h);
  return s / (static_cast<double>(xs.size()) * h);
}

double local_constant_estimate(double x, const RegressionData& data, double h, Kernel kernel) {
  check_bandwidth(h);
  const auto w = window_sums(x, data, h, kernel);
  require(w.s0 > 0.0, Errc::domain_error, "local estimate: empty window");
  return w.sy / w.s0;
}

LocalQuadratic local_quadratic(double x, const RegressionData& data, double h, Kernel kernel) {
  LocalQuadratic q;
  q.m_tilde = local_constant_estimate(x, data, h, kernel);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double k = kernel_scaled(kernel, (data.x[i] - x) / h);
    if (k == 0.0) continue;
    q.s0 += k;
    q.q0 += k * (data.y[i] - q.m_tilde) * (data.y[i] - q.m_tilde);
  }
  return q;
}

double local_log_likelihood(double x, const RegressionData& data, double h, Kernel kernel, double a,
                            double sigma) {
  check_bandwidth(h);
  require(sigma > 0.0, Errc::domain_error, "local likelihood: sigma must be positive");
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sigma);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double k = kernel_scaled(kernel, (data.x[i] - x) / h);
    if (k == 0.0) continue;
    const double z = (data.y[i] - a) / sigma;
    total += k * (log_norm - 0.5 * z * z);
  }
  return total;
}

LocalPosterior local_posterior(double x, const RegressionData& data, double h, Kernel kernel,
                               const LocalPrior& prior) {
  check_bandwidth(h);
  prior.validate();
  const auto w = window_sums(x, data, h, kernel);
  LocalPosterior post;
  post.s0 = w.s0;
  post.w0 = prior.w0(x);
  post.m0 = prior.m0(x);
  require(post.w0 + post.s0 > 0.0, Errc::domain_error,
          "local posterior: prior precision and information weight are both zero");
  const double shrink = post.w0 / (post.w0 + post.s0);
  if (w.s0 > 0.0) {
    post.m_tilde = w.sy / w.s0;
    post.mean = *post.m_tilde + shrink * (post.m0 - *post.m_tilde);
  } else {
    post.mean = post.m0;
  }
  post.variance = prior.sigma * prior.sigma / (post.w0 + post.s0);
  return post;
}

double empirical_bayes_precision(const RegressionData& data, std::span<const double> grid, double h,
                                 Kernel kernel, const CurveSpec& m0, double sigma) {
  check_bandwidth(h);
  require(sigma > 0.0, Errc::domain_error, "empirical Bayes: sigma must be positive");
  double sum = 0.0;
  std::size_t used = 0;
  for (double x : grid) {
    const auto w = window_sums(x, data, h, kernel);
    if (!(w.s0 > 0.0)) continue;
    const double d = w.sy / w.s0 - m0(x);
    sum += d * d - sigma * sigma / w.s0;
    ++used;
  }
  require(used > 0, Errc::domain_error, "empirical Bayes: every grid window is empty");
  return sigma * sigma / std::max(kPrecisionFloor, sum / static_cast<double>(used));
}

double plugin_sigma(const RegressionData& data, double h, Kernel kernel) {
  double ss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = data.y[i] - local_constant_estimate(data.x[i], data, h, kernel);
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(data.size()));
}

XiPosterior xi_posterior(const RegressionData& data, const HierarchicalOptions& opts, double sigma) {
  require(sigma > 0.0, Errc::domain_error, "xi posterior: sigma must be positive");
  const Mat2& s = opts.xi_cov;
  require(s[0][0] >= 0.0 && s[1][1] >= 0.0 && s[0][1] == s[1][0] &&
              s[0][1] * s[0][1] <= s[0][0] * s[1][1],
          Errc::domain_error, "xi prior covariance must be symmetric positive semidefinite");
  // Posterior mean mu + S (A S + sigma^2 I)^-1 r with A = X^T X, r = X^T (y - X mu);
  // written this way S may be singular.
  Mat2 a{};
  std::array<double, 2> r{0.0, 0.0};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double xi = data.x[i];
    a[0][0] += 1.0;
    a[0][1] += xi;
    a[1][1] += xi * xi;
    const double resid = data.y[i] - (opts.xi_mean[0] + opts.xi_mean[1] * xi);
    r[0] += resid;
    r[1] += xi * resid;
  }
  a[1][0] = a[0][1];
  Mat2 as = mul(a, s);
  as[0][0] += sigma * sigma;
  as[1][1] += sigma * sigma;
  const Mat2 gain = mul(s, inverse2(as));
  XiPosterior post;
  for (int i = 0; i < 2; ++i) post.mean[i] = opts.xi_mean[i] + gain[i][0] * r[0] + gain[i][1] * r[1];
  const Mat2 reduction = mul(mul(gain, a), s);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) post.cov[i][j] = s[i][j] - reduction[i][j];
  const double off = 0.5 * (post.cov[0][1] + post.cov[1][0]);
  post.cov[0][1] = post.cov[1][0] = off;
  post.cov[0][0] = std::max(0.0, post.cov[0][0]);
  post.cov[1][1] = std::max(0.0, post.cov[1][1]);
  return post;
}

namespace {

struct CurveValues {
  std::vector<double> mean;
  std::vector<double> var;
  std::vector<double> s0;
  std::vector<double> m_tilde;
  std::vector<bool> gap;
};

CurveValues single_curve(const RegressionData& data, std::span<const double> grid, double h, Kernel kernel,
                         const LocalPrior& prior) {
  CurveValues c;
  for (double x : grid) {
    const auto w = window_sums(x, data, h, kernel);
    const double w0 = prior.w0(x);
    c.s0.push_back(w.s0);
    c.gap.push_back(!(w.s0 > 0.0));
    c.m_tilde.push_back(w.s0 > 0.0 ? w.sy / w.s0 : kNaN);
    if (w0 + w.s0 > 0.0) {
      const auto post = local_posterior(x, data, h, kernel, prior);
      c.mean.push_back(post.mean);
      c.var.push_back(post.variance);
    } else {
      c.mean.push_back(kNaN);
      c.var.push_back(kNaN);
    }
  }
  return c;
}

}  // namespace

LocalFit fit_curve(const RegressionData& data, std::span<const double> grid, double h, Kernel kernel,
                   const LocalPrior& prior, const FitOptions& options, RngState* rng) {
  check_bandwidth(h);
  prior.validate();
  require(!grid.empty(), Errc::invalid_argument, "fit_curve: grid is empty");
  LocalFit fit;
  fit.x.assign(grid.begin(), grid.end());
  fit.sigma = prior.sigma;

  if (!options.hierarchical) {
    LocalPrior used = prior;
    if (options.empirical_bayes) {
      const double w = empirical_bayes_precision(data, grid, h, kernel, prior.m0, prior.sigma);
      used.w0 = CurveSpec::constant(w);
      fit.w0_hat = w;
    }
    auto c = single_curve(data, grid, h, kernel, used);
    fit.mean = std::move(c.mean);
    for (double v : c.var) fit.sd.push_back(std::sqrt(v));
    fit.s0 = std::move(c.s0);
    fit.m_tilde = std::move(c.m_tilde);
    fit.gap = std::move(c.gap);
    return fit;
  }

  const auto& hier = *options.hierarchical;
  require(rng != nullptr, Errc::invalid_argument, "fit_curve: hierarchical step needs an rng");
  require(hier.n_draws >= 1, Errc::domain_error, "fit_curve: need at least one hierarchical draw");
  const auto post = xi_posterior(data, hier, prior.sigma);
  const double l00 = std::sqrt(post.cov[0][0]);
  const double l10 = l00 > 0.0 ? post.cov[1][0] / l00 : 0.0;
  const double l11 = std::sqrt(std::max(0.0, post.cov[1][1] - l10 * l10));

  const std::size_t g = grid.size();
  std::vector<double> mean(g, 0.0);
  std::vector<double> m2(g, 0.0);
  std::vector<double> avg_var(g, 0.0);
  CurveValues last;
  for (std::size_t j = 1; j <= hier.n_draws; ++j) {
    const double z0 = sample_normal(*rng);
    const double z1 = sample_normal(*rng);
    const double xi0 = post.mean[0] + l00 * z0;
    const double xi1 = post.mean[1] + l10 * z0 + l11 * z1;
    LocalPrior draw = prior;
    draw.m0 = CurveSpec::linear(xi0, xi1);
    if (options.empirical_bayes) {
      draw.w0 = CurveSpec::constant(empirical_bayes_precision(data, grid, h, kernel, draw.m0, prior.sigma));
    }
    last = single_curve(data, grid, h, kernel, draw);
    const double k = static_cast<double>(j);
    for (std::size_t i = 0; i < g; ++i) {
      const double delta = last.mean[i] - mean[i];
      mean[i] += delta / k;
      m2[i] += delta * (last.mean[i] - mean[i]);
      avg_var[i] += (last.var[i] - avg_var[i]) / k;
    }
  }
  // Mixture variance: average within-draw variance plus spread of the curves.
  const double n = static_cast<double>(hier.n_draws);
  fit.mean = std::move(mean);
  for (std::size_t i = 0; i < g; ++i) fit.sd.push_back(std::sqrt(avg_var[i] + m2[i] / n));
  fit.s0 = std::move(last.s0);
  fit.m_tilde = std::move(last.m_tilde);
  fit.gap = std::move(last.gap);
  return fit;
}

}  // namespace npbayes
