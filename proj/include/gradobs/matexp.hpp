#pragma once

#include <Eigen/Dense>

namespace gradobs {

/// Dense matrix exponential, degree-13 Pade approximant with 1-norm
/// scaling and squaring.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

/// Repeated evaluation of exp(M t) e0.  Uses the eigendecomposition of M
/// when the eigenvector matrix is well conditioned (condition number below
/// `cond_limit`), otherwise steps with a single expm(M dt).
class ErrorPropagator {
 public:
  explicit ErrorPropagator(Eigen::MatrixXd m, double cond_limit = 1e8);

  bool using_eigenbasis() const { return eig_ok_; }
  const Eigen::MatrixXd& matrix() const { return m_; }

  Eigen::VectorXd at(double t, const Eigen::VectorXd& e0) const;
  /// Columns k = 0..steps hold exp(M k dt) e0.
  Eigen::MatrixXd propagate_grid(const Eigen::VectorXd& e0, double dt,
                                 int steps) const;

 private:
  Eigen::MatrixXd m_;
  bool eig_ok_ = false;
  Eigen::MatrixXcd v_, v_inv_;
  Eigen::VectorXcd evals_;
};

}  // namespace gradobs
