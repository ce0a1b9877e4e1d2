#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gradobs/quadrature.hpp"
#include "gradobs/spectral.hpp"

namespace gradobs {

/// Sides of the rectangle.  The side coordinate s runs from the corner with
/// the smaller axis value: bottom/top are parametrized by xi1 in [0, a1],
/// left/right by xi2 in [0, a2].
enum class Side { Bottom, Right, Top, Left };

const char* side_name(Side side);
double side_length(Side side, const RectDomain& domain);
Eigen::Vector2d side_point(Side side, const RectDomain& domain, double s);
Eigen::Vector2d side_normal(Side side);

struct BoundarySegment {
  Side side;
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const BoundarySegment&, const BoundarySegment&) = default;
};

/// A union of boundary segments with pairwise disjoint interiors.  Segments
/// of zero length are rejected.
class BoundaryRegion {
 public:
  BoundaryRegion(const RectDomain& domain, std::vector<BoundarySegment> segments);
  static BoundaryRegion full_boundary(const RectDomain& domain);

  const RectDomain& domain() const { return domain_; }
  const std::vector<BoundarySegment>& segments() const { return segments_; }

 private:
  RectDomain domain_;
  std::vector<BoundarySegment> segments_;
};

/// A 2-vector field sampled at per-segment Gauss-Legendre boundary nodes,
/// with the arclength weights needed for L^2(Gamma) quadrature.
struct BoundaryTraceField {
  std::vector<BoundarySegment> segments;
  std::vector<int> offsets;  // per-segment start index; back() == node count
  Eigen::ArrayXd s;          // side coordinate per node
  Eigen::ArrayXd px, py;     // node position
  Eigen::ArrayXd w;          // arclength weights
  Eigen::ArrayXd vx, vy;     // traced gradient components

  int nodes() const { return static_cast<int>(w.size()); }
};

/// chi_Gamma gamma grad on the truncated space: maps modal coefficients to
/// the gradient trace sampled on a boundary region.  The node layout and the
/// per-mode gradient tables are assembled once; apply() is a matvec.
class BoundaryTraceOperator {
 public:
  BoundaryTraceOperator(BasisPtr basis, BoundaryRegion region,
                        int points_per_segment);

  const BoundaryRegion& region() const { return region_; }
  const BasisPtr& basis() const { return basis_; }
  int points_per_segment() const { return points_per_segment_; }

  BoundaryTraceField apply(const ModalField& field) const;
  /// True when mode k contributes nothing to the trace on this region.
  bool mode_is_trace_null(std::size_t k, double tol = 1e-12) const;

 private:
  BasisPtr basis_;
  BoundaryRegion region_;
  int points_per_segment_;
  BoundaryTraceField layout_;  // values zero; cloned per apply
  Eigen::MatrixXd gx_, gy_;    // nodes x modes gradient tables
};

/// One-shot convenience for the operator above.
BoundaryTraceField boundary_gradient_trace(const ModalField& field,
                                           const BoundaryRegion& region,
                                           const QuadratureRule& rule);

/// Quadrature L^2(Gamma) norm of the traced 2-vector field.
double trace_norm(const BoundaryTraceField& tf);

/// chi_Gamma on an already-sampled field: keeps the segments listed in
/// `region` (each must match one of the field's segments exactly).
BoundaryTraceField restrict_to(const BoundaryTraceField& tf,
                               const BoundaryRegion& region);

/// Adjoint of restriction: the field extended by zero to the full boundary.
/// Complementary segments get their own nodes from `rule`.
BoundaryTraceField extend_by_zero(const BoundaryTraceField& tf,
                                  const RectDomain& domain,
                                  const QuadratureRule& rule);

/// Quadrature inner product of two trace fields sampled on the same layout.
double trace_inner(const BoundaryTraceField& a, const BoundaryTraceField& b);

/// Adjoint gradient per the Dirichlet problem  Delta v = -div(y), v = 0 on
/// the boundary, solved spectrally in the given DirichletSine basis.  The
/// two components y1, y2 may live on different bases over the same domain.
ModalField gradient_adjoint(const ModalField& y1, const ModalField& y2,
                            const BasisPtr& solver_basis,
                            const QuadratureRule& rule);

}  // namespace gradobs
