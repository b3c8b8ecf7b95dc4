#pragma once

// Internal numerical helpers: fixed Gauss rules, adaptive quadrature and
// compensated summation.

#include <cstddef>
#include <functional>
#include <vector>

namespace npbayes::detail {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(std::size_t n);

/// n-point Gauss-Hermite rule for the weight exp(-x^2) on the real line.
GaussRule gauss_hermite(std::size_t n);

struct QuadResult {
  double value;
  double error;
};

/// Adaptive Gauss-Kronrod (15 point) on [a, b]; either end may be infinite.
/// Stops once the error estimate is below tolerance * max(1, |integral|) or
/// max_intervals segments are in use; callers check the returned error.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double tolerance = 1e-10, unsigned max_intervals = 2000);

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

}  // namespace npbayes::detail
