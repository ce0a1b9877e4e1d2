#include "gradobs/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace gradobs {

namespace {

// Newton iteration on the Legendre polynomial P_n, Chebyshev initial guesses.
GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  static std::map<int, GaussLegendre> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, compute_gauss_legendre(n)).first;
  }
  return it->second;
}

Interval1dRule gauss_legendre_on(double a, double b, int n) {
  if (!(b > a)) throw std::invalid_argument("gauss_legendre_on: need b > a");
  const GaussLegendre& base = gauss_legendre(n);
  Interval1dRule rule;
  const double mid = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  rule.x = mid + hw * base.nodes;
  rule.w = hw * base.weights;
  return rule;
}

AreaRule tensor_rule(double ax, double bx, double ay, double by,
                     int points_per_axis) {
  Interval1dRule rx = gauss_legendre_on(ax, bx, points_per_axis);
  Interval1dRule ry = gauss_legendre_on(ay, by, points_per_axis);
  const int n = points_per_axis;
  AreaRule rule;
  rule.x.resize(n * n);
  rule.y.resize(n * n);
  rule.w.resize(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int k = i * n + j;
      rule.x[k] = rx.x[i];
      rule.y[k] = ry.x[j];
      rule.w[k] = rx.w[i] * ry.w[j];
    }
  }
  return rule;
}

}  // namespace gradobs
