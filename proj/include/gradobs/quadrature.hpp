#pragma once

#include <Eigen/Dense>

namespace gradobs {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

/// Cached n-point rule; n >= 1.
const GaussLegendre& gauss_legendre(int n);

/// Rule mapped to [a, b].
struct Interval1dRule {
  Eigen::ArrayXd x;
  Eigen::ArrayXd w;
};
Interval1dRule gauss_legendre_on(double a, double b, int n);

/// Tensor-product rule over [ax, bx] x [ay, by], flattened with the
/// x index outermost.
struct AreaRule {
  Eigen::ArrayXd x;
  Eigen::ArrayXd y;
  Eigen::ArrayXd w;
};
AreaRule tensor_rule(double ax, double bx, double ay, double by,
                     int points_per_axis);

/// Quadrature resolution used across the library.  Area rules are
/// tensor-product Gauss-Legendre; boundary and filament integrals use a
/// per-segment rule.
struct QuadratureRule {
  int area_points_per_axis = 32;
  int boundary_points_per_segment = 64;
};

}  // namespace gradobs
