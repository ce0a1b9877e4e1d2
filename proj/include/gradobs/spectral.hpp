#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "gradobs/quadrature.hpp"

namespace gradobs {

/// Rectangle ]0, a1[ x ]0, a2[.
struct RectDomain {
  double a1 = 1.0;
  double a2 = 1.0;

  RectDomain(double a1_, double a2_);
  /// Point membership in the closed rectangle.
  bool contains(double x, double y) const;
  bool same_as(const RectDomain& other) const {
    return a1 == other.a1 && a2 == other.a2;
  }
};

/// Boundary-condition family of the Laplacian eigenbasis.
/// NeumannCosine: cos(n pi x/a1) cos(m pi y/a2), n, m >= 0 (zero normal flux).
/// DirichletSine: sin(n pi x/a1) sin(m pi y/a2), n, m >= 1 (zero trace).
enum class BcFamily { NeumannCosine, DirichletSine };

const char* bc_family_name(BcFamily family);

struct Mode {
  int n = 0;
  int m = 0;
  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Smallest admissible index for the family (0 Neumann, 1 Dirichlet).
int min_mode_index(BcFamily family);
bool mode_valid(Mode mode, BcFamily family);

/// lambda_nm = -(n^2/a1^2 + m^2/a2^2) pi^2.  Throws on an index invalid
/// for the family.
double eigenvalue(Mode mode, const RectDomain& domain, BcFamily family);

/// Truncated Laplacian eigenbasis on a rectangle.  Modes are ordered
/// lexicographically in (n, m) so every matrix built on top of a basis is
/// reproducible.  Basis functions are normalized to unit H^1(Omega) norm:
/// since ||grad phi||^2 = -lambda ||phi||^2 for both families, the
/// normalization constant is
///   kappa_nm = 1 / sqrt((1 - lambda_nm) e_n e_m a1 a2),
/// e_k = 1 for the constant cosine factor and 1/2 otherwise.  The basis is
/// then H^1-orthonormal, so modal coefficients are H^1 inner products and
/// the H^1 norm of a field is the Euclidean norm of its coefficients.
///
/// Immutable after construction; share via shared_ptr between tasks.
class ModalBasis {
 public:
  ModalBasis(RectDomain domain, BcFamily family, int n_max, int m_max);

  const RectDomain& domain() const { return domain_; }
  BcFamily family() const { return family_; }
  int n_max() const { return n_max_; }
  int m_max() const { return m_max_; }
  std::size_t size() const { return modes_.size(); }
  const std::vector<Mode>& modes() const { return modes_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  std::size_t index_of(Mode mode) const;  // throws if not in the truncation
  double eigenvalue_of(std::size_t k) const { return eigenvalues_[k]; }
  double norm_constant(std::size_t k) const { return kappa_[k]; }

  /// phi_k at a point of the closed rectangle (not range-checked; the
  /// checked entry points are eigenfunction_eval / grad_eigenfunction_eval).
  double value(std::size_t k, double x, double y) const;
  Eigen::Vector2d gradient(std::size_t k, double x, double y) const;

  /// Batch evaluation over node arrays (used by assembly loops).
  void values_at(std::size_t k, const double* xs, const double* ys,
                 double* out, std::size_t count) const;
  void gradients_at(std::size_t k, const double* xs, const double* ys,
                    double* out_x, double* out_y, std::size_t count) const;

  bool same_as(const ModalBasis& other) const;

 private:
  RectDomain domain_;
  BcFamily family_;
  int n_max_;
  int m_max_;
  std::vector<Mode> modes_;
  Eigen::VectorXd eigenvalues_;
  Eigen::VectorXd kappa_;
};

using BasisPtr = std::shared_ptr<const ModalBasis>;

BasisPtr make_basis(RectDomain domain, BcFamily family, int n_max, int m_max);

/// Checked evaluation of an eigenfunction / its gradient at a point of the
/// closed rectangle.  Throws if the mode is invalid for the family or the
/// point lies outside the domain.
double eigenfunction_eval(Mode mode, const ModalBasis& basis, double x, double y);
Eigen::Vector2d grad_eigenfunction_eval(Mode mode, const ModalBasis& basis,
                                        double x, double y);

/// Coefficient vector over a ModalBasis (states, observer states, errors).
class ModalField {
 public:
  ModalField(BasisPtr basis, Eigen::VectorXd coeffs);
  static ModalField zero(BasisPtr basis);

  const BasisPtr& basis() const { return basis_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  double eval(double x, double y) const;
  Eigen::Vector2d eval_gradient(double x, double y) const;
  /// H^1(Omega) norm == Euclidean coefficient norm (orthonormal basis).
  double h1_norm() const { return coeffs_.norm(); }

 private:
  BasisPtr basis_;
  Eigen::VectorXd coeffs_;
};

/// Exact semigroup action on the truncation: coefficient k is scaled by
/// exp(lambda_k t).  Throws for t < 0.
ModalField semigroup_propagate(const ModalField& field, double t);

/// Analytic profile with its gradient; what project() integrates against.
struct Profile {
  std::function<double(double, double)> value;
  std::function<Eigen::Vector2d(double, double)> gradient;
};

/// H^1 projection onto the basis by tensor-product quadrature.  Rejects a
/// rule too coarse for the truncation (fewer than 3 * max(n_max, m_max)
/// points per axis).
ModalField project(const Profile& profile, const BasisPtr& basis,
                   const QuadratureRule& rule);

}  // namespace gradobs
