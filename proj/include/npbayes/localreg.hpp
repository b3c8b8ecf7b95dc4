#pragma once

// Kernel-weighted local Bayesian regression for the local-constant model.
// Each data pair carries information weight Kbar((x_i - x)/h) in [0,1] for
// the local level a_x; a N(m0(x), sigma^2/w0(x)) prior on a_x gives a
// normal posterior with precision (w0 + s0)/sigma^2.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "npbayes/randkit.hpp"

namespace npbayes {

/// Kernels K on [-1/2, 1/2] integrating to 1.
enum class Kernel { uniform, epanechnikov, triangular, biweight };

double kernel_value(Kernel k, double u);
/// Kbar(u) = K(u) / K(0).
double kernel_scaled(Kernel k, double u);

struct RegressionData {
  std::vector<double> x;
  std::vector<double> y;

  RegressionData(std::vector<double> x, std::vector<double> y);
  std::size_t size() const { return x.size(); }
};

/// Piecewise-linear function of x: constant, linear xi0 + xi1 x, or
/// tabulated with linear interpolation and flat extrapolation.
class CurveSpec {
 public:
  static CurveSpec constant(double c);
  static CurveSpec linear(double xi0, double xi1);
  static CurveSpec tabulated(std::vector<double> xs, std::vector<double> values);

  double operator()(double x) const;
  double min_value() const;

 private:
  CurveSpec() = default;
  int kind_ = 0;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<double> xs_;
  std::vector<double> values_;
};

struct LocalPrior {
  CurveSpec m0 = CurveSpec::constant(0.0);
  CurveSpec w0 = CurveSpec::constant(0.0);
  double sigma = 1.0;

  void validate() const;
};

struct KernelWeights {
  std::vector<double> weights;  ///< Kbar((x_i - x)/h), zero outside the window
  double s0 = 0.0;
};

KernelWeights kernel_weights(double x, const RegressionData& data, double h, Kernel kernel);

/// f_n(x) = (n h)^-1 sum K((x_i - x)/h).
double kernel_density(double x, std::span<const double> xs, double h, Kernel kernel);

/// Nadaraya-Watson sum Kbar y_i / sum Kbar. Throws on an empty window.
double local_constant_estimate(double x, const RegressionData& data, double h, Kernel kernel);

/// s0, the local estimate, and Q0 = sum Kbar (y_i - m_tilde)^2.
struct LocalQuadratic {
  double s0 = 0.0;
  double m_tilde = 0.0;
  double q0 = 0.0;
  /// Q(x, a) = Q0 + s0 (a - m_tilde)^2.
  double at(double a) const { return q0 + s0 * (a - m_tilde) * (a - m_tilde); }
};

LocalQuadratic local_quadratic(double x, const RegressionData& data, double h, Kernel kernel);

/// log L_n(x, a, sigma) = sum Kbar_i log phi((y_i - a)/sigma)/sigma, evaluated term by term.
double local_log_likelihood(double x, const RegressionData& data, double h, Kernel kernel, double a,
                            double sigma);

struct LocalPosterior {
  double mean = 0.0;
  double variance = 0.0;
  double s0 = 0.0;
  double w0 = 0.0;
  double m0 = 0.0;
  std::optional<double> m_tilde;  ///< absent when the window is empty
};

LocalPosterior local_posterior(double x, const RegressionData& data, double h, Kernel kernel,
                               const LocalPrior& prior);

/// sigma^2 / max(1e-8, mean over grid[(m_tilde - m0)^2 - sigma^2/s0]), grid points with s0 > 0 only.
double empirical_bayes_precision(const RegressionData& data, std::span<const double> grid, double h,
                                 Kernel kernel, const CurveSpec& m0, double sigma);

/// sqrt((1/n) sum (y_i - m_tilde(x_i))^2).
double plugin_sigma(const RegressionData& data, double h, Kernel kernel);

/// Gaussian background prior on (xi0, xi1) for m0(x, xi) = xi0 + xi1 x. The
/// covariance may be singular.
struct HierarchicalOptions {
  std::array<double, 2> xi_mean{0.0, 0.0};
  std::array<std::array<double, 2>, 2> xi_cov{{{1.0, 0.0}, {0.0, 1.0}}};
  std::size_t n_draws = 200;
};

/// Posterior of xi under y_i = xi0 + xi1 x_i + N(0, sigma^2).
struct XiPosterior {
  std::array<double, 2> mean{};
  std::array<std::array<double, 2>, 2> cov{};
};

XiPosterior xi_posterior(const RegressionData& data, const HierarchicalOptions& opts, double sigma);

struct FitOptions {
  bool empirical_bayes = false;  ///< replace w0 by the plug-in constant
  std::optional<HierarchicalOptions> hierarchical;
};

struct LocalFit {
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<double> s0;
  std::vector<double> m_tilde;  ///< NaN in gaps
  std::vector<bool> gap;        ///< empty window at this grid point
  double sigma = 0.0;
  std::optional<double> w0_hat;  ///< set when the plug-in precision was used (non-hierarchical)
};

/// rng is only used for the hierarchical step and may be null otherwise.
LocalFit fit_curve(const RegressionData& data, std::span<const double> grid, double h, Kernel kernel,
                   const LocalPrior& prior, const FitOptions& options, RngState* rng);

}  // namespace npbayes
