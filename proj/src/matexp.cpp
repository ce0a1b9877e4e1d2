#include "gradobs/matexp.hpp"

#include <cmath>
#include <stdexcept>

namespace gradobs {

namespace {

// Degree-13 Pade numerator coefficients (Higham's scaling-and-squaring).
constexpr double kB13[] = {64764752532480000.0, 32382376266240000.0,
                           7771770303897600.0,  1187353796428800.0,
                           129060195264000.0,   10559470521600.0,
                           670442572800.0,      33522128640.0,
                           1323241920.0,        40840800.0,
                           960960.0,            16380.0,
                           182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

Eigen::MatrixXd pade13(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a4 * a2;
  Eigen::MatrixXd u =
      a * (a6 * (kB13[13] * a6 + kB13[11] * a4 + kB13[9] * a2) + kB13[7] * a6 +
           kB13[5] * a4 + kB13[3] * a2 + kB13[1] * id);
  Eigen::MatrixXd v = a6 * (kB13[12] * a6 + kB13[10] * a4 + kB13[8] * a2) +
                      kB13[6] * a6 + kB13[4] * a4 + kB13[2] * a2 + kB13[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
  if (a.rows() == 0) return a;
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  int squarings = 0;
  if (norm > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  }
  Eigen::MatrixXd e = pade13(a / std::exp2(squarings));
  for (int i = 0; i < squarings; ++i) e = e * e;
  return e;
}

ErrorPropagator::ErrorPropagator(Eigen::MatrixXd m, double cond_limit)
    : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("ErrorPropagator: matrix must be square");
  }
  if (m_.rows() == 0) return;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m_);
  if (es.info() != Eigen::Success) return;
  Eigen::MatrixXcd v = es.eigenvectors();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin >= cond_limit) return;
  evals_ = es.eigenvalues();
  v_ = std::move(v);
  v_inv_ = v_.partialPivLu().solve(Eigen::MatrixXcd::Identity(m_.rows(), m_.cols()));
  eig_ok_ = true;
}

Eigen::VectorXd ErrorPropagator::at(double t, const Eigen::VectorXd& e0) const {
  if (e0.size() != m_.rows()) throw std::invalid_argument("ErrorPropagator: size mismatch");
  if (eig_ok_) {
    Eigen::VectorXcd y = v_inv_ * e0.cast<std::complex<double>>();
    y.array() *= (evals_.array() * t).exp();
    return (v_ * y).real();
  }
  return expm(m_ * t) * e0;
}

Eigen::MatrixXd ErrorPropagator::propagate_grid(const Eigen::VectorXd& e0,
                                                double dt, int steps) const {
  if (e0.size() != m_.rows()) throw std::invalid_argument("ErrorPropagator: size mismatch");
  if (!(dt > 0.0) || steps < 0) {
    throw std::invalid_argument("ErrorPropagator: need dt > 0 and steps >= 0");
  }
  Eigen::MatrixXd out(e0.size(), steps + 1);
  if (eig_ok_) {
    Eigen::VectorXcd y0 = v_inv_ * e0.cast<std::complex<double>>();
    for (int k = 0; k <= steps; ++k) {
      Eigen::VectorXcd y = (evals_.array() * (k * dt)).exp() * y0.array();
      out.col(k) = (v_ * y).real();
    }
    return out;
  }
  const Eigen::MatrixXd step = expm(m_ * dt);
  Eigen::VectorXd e = e0;
  out.col(0) = e;
  for (int k = 1; k <= steps; ++k) {
    e = step * e;
    out.col(k) = e;
  }
  return out;
}

}  // namespace gradobs
