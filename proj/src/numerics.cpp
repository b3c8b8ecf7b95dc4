#include "numerics.hpp"

#include <cmath>
#include <numbers>
#include <queue>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "npbayes/error.hpp"

namespace npbayes::detail {

GaussRule gauss_legendre(std::size_t n) {
  require(n >= 1, Errc::domain_error, "gauss_legendre: need at least one node");
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

GaussRule gauss_hermite(std::size_t n) {
  require(n >= 1, Errc::domain_error, "gauss_hermite: need at least one node");
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const double nd = static_cast<double>(n);
  const std::size_t half = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    // Initial guesses as in the classical Numerical Recipes routine.
    if (i == 0) {
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nd, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / jd) * p2 - std::sqrt((jd - 1.0) / jd) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15 * std::max(1.0, std::fabs(z))) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  return rule;
}

namespace {

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace

// Global adaptive GK15: always split the segment with the largest error
// estimate. Boost supplies the rule; its own recursion uses a purely relative
// tolerance, which never terminates on integrands that are tiny but noisy.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double tolerance,
                     unsigned max_intervals) {
  if (a == b) return {0.0, 0.0};
  if (a > b) {
    const auto r = integrate(f, b, a, tolerance, max_intervals);
    return {-r.value, r.error};
  }
  // Infinite ends are mapped onto a finite t range.
  std::function<double(double)> g;
  double lo = a, hi = b;
  if (std::isinf(a) && std::isinf(b)) {
    g = [&f](double t) {
      const double d = 1.0 - t * t;
      return f(t / d) * (1.0 + t * t) / (d * d);
    };
    lo = -1.0;
    hi = 1.0;
  } else if (std::isinf(b)) {
    g = [&f, a](double t) { return f(a + t / (1.0 - t)) / ((1.0 - t) * (1.0 - t)); };
    lo = 0.0;
    hi = 1.0;
  } else if (std::isinf(a)) {
    g = [&f, b](double t) { return f(b - t / (1.0 - t)) / ((1.0 - t) * (1.0 - t)); };
    lo = 0.0;
    hi = 1.0;
  } else {
    g = f;
  }
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  const auto apply = [&g](double l, double h) {
    double err = 0.0;
    const double v = Rule::integrate(g, l, h, 0, 0.0, &err);
    return Segment{l, h, v, err};
  };
  std::priority_queue<Segment> heap;
  heap.push(apply(lo, hi));
  double total = heap.top().value;
  double error = heap.top().error;
  while (heap.size() < max_intervals && error > tolerance * std::max(1.0, std::abs(total))) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;  // cannot split further
    heap.pop();
    const Segment left = apply(worst.lo, mid);
    const Segment right = apply(mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // re-add from scratch to shed accumulated rounding in the running sums
  CompensatedSum v, e;
  while (!heap.empty()) {
    v.add(heap.top().value);
    e.add(heap.top().error);
    heap.pop();
  }
  if (!std::isfinite(v.value())) fail(Errc::numerical_failure, "integrate: non-finite integral");
  return {v.value(), e.value()};
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace npbayes::detail
