#include "gradobs/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gradobs/kernels.hpp"

namespace gradobs {

namespace {
constexpr double kPi = std::numbers::pi;
}

RectDomain::RectDomain(double a1_, double a2_) : a1(a1_), a2(a2_) {
  if (!(a1 > 0.0) || !(a2 > 0.0)) {
    throw std::invalid_argument("RectDomain: side lengths must be positive");
  }
}

bool RectDomain::contains(double x, double y) const {
  return x >= 0.0 && x <= a1 && y >= 0.0 && y <= a2;
}

const char* bc_family_name(BcFamily family) {
  return family == BcFamily::NeumannCosine ? "neumann" : "dirichlet";
}

int min_mode_index(BcFamily family) {
  return family == BcFamily::NeumannCosine ? 0 : 1;
}

bool mode_valid(Mode mode, BcFamily family) {
  const int lo = min_mode_index(family);
  return mode.n >= lo && mode.m >= lo;
}

double eigenvalue(Mode mode, const RectDomain& domain, BcFamily family) {
  if (!mode_valid(mode, family)) {
    throw std::invalid_argument("eigenvalue: mode index invalid for the boundary family");
  }
  const double n = mode.n, m = mode.m;
  return -(n * n / (domain.a1 * domain.a1) + m * m / (domain.a2 * domain.a2)) *
         kPi * kPi;
}

ModalBasis::ModalBasis(RectDomain domain, BcFamily family, int n_max, int m_max)
    : domain_(domain), family_(family), n_max_(n_max), m_max_(m_max) {
  const int lo = min_mode_index(family);
  if (n_max < lo || m_max < lo) {
    throw std::invalid_argument("ModalBasis: truncation below the smallest mode index");
  }
  for (int n = lo; n <= n_max; ++n) {
    for (int m = lo; m <= m_max; ++m) {
      modes_.push_back({n, m});
    }
  }
  eigenvalues_.resize(modes_.size());
  kappa_.resize(modes_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const Mode mode = modes_[k];
    const double lam = eigenvalue(mode, domain_, family_);
    eigenvalues_[k] = lam;
    const bool cosine = family_ == BcFamily::NeumannCosine;
    const double en = (cosine && mode.n == 0) ? 1.0 : 0.5;
    const double em = (cosine && mode.m == 0) ? 1.0 : 0.5;
    kappa_[k] = 1.0 / std::sqrt((1.0 - lam) * en * em * domain_.a1 * domain_.a2);
  }
}

std::size_t ModalBasis::index_of(Mode mode) const {
  const int lo = min_mode_index(family_);
  if (mode.n < lo || mode.n > n_max_ || mode.m < lo || mode.m > m_max_) {
    throw std::invalid_argument("ModalBasis: mode outside the truncation");
  }
  const int span_m = m_max_ - lo + 1;
  return static_cast<std::size_t>((mode.n - lo) * span_m + (mode.m - lo));
}

double ModalBasis::value(std::size_t k, double x, double y) const {
  const Mode mode = modes_[k];
  const double ax = mode.n * kPi / domain_.a1;
  const double ay = mode.m * kPi / domain_.a2;
  if (family_ == BcFamily::NeumannCosine) {
    return kappa_[k] * std::cos(ax * x) * std::cos(ay * y);
  }
  return kappa_[k] * std::sin(ax * x) * std::sin(ay * y);
}

Eigen::Vector2d ModalBasis::gradient(std::size_t k, double x, double y) const {
  const Mode mode = modes_[k];
  const double ax = mode.n * kPi / domain_.a1;
  const double ay = mode.m * kPi / domain_.a2;
  const double kap = kappa_[k];
  if (family_ == BcFamily::NeumannCosine) {
    return {-kap * ax * std::sin(ax * x) * std::cos(ay * y),
            -kap * ay * std::cos(ax * x) * std::sin(ay * y)};
  }
  return {kap * ax * std::cos(ax * x) * std::sin(ay * y),
          kap * ay * std::sin(ax * x) * std::cos(ay * y)};
}

void ModalBasis::values_at(std::size_t k, const double* xs, const double* ys,
                           double* out, std::size_t count) const {
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = value(k, xs[i], ys[i]);
  }
}

void ModalBasis::gradients_at(std::size_t k, const double* xs, const double* ys,
                              double* out_x, double* out_y,
                              std::size_t count) const {
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::Vector2d g = gradient(k, xs[i], ys[i]);
    out_x[i] = g.x();
    out_y[i] = g.y();
  }
}

bool ModalBasis::same_as(const ModalBasis& other) const {
  return domain_.same_as(other.domain_) && family_ == other.family_ &&
         n_max_ == other.n_max_ && m_max_ == other.m_max_;
}

BasisPtr make_basis(RectDomain domain, BcFamily family, int n_max, int m_max) {
  return std::make_shared<const ModalBasis>(domain, family, n_max, m_max);
}

namespace {

void check_point(const ModalBasis& basis, double x, double y) {
  if (!basis.domain().contains(x, y)) {
    throw std::invalid_argument("point outside the closed domain");
  }
}

}  // namespace

double eigenfunction_eval(Mode mode, const ModalBasis& basis, double x, double y) {
  check_point(basis, x, y);
  return basis.value(basis.index_of(mode), x, y);
}

Eigen::Vector2d grad_eigenfunction_eval(Mode mode, const ModalBasis& basis,
                                        double x, double y) {
  check_point(basis, x, y);
  return basis.gradient(basis.index_of(mode), x, y);
}

ModalField::ModalField(BasisPtr basis, Eigen::VectorXd coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw std::invalid_argument("ModalField: null basis");
  if (static_cast<std::size_t>(coeffs_.size()) != basis_->size()) {
    throw std::invalid_argument("ModalField: coefficient count != mode count");
  }
}

ModalField ModalField::zero(BasisPtr basis) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
  return ModalField(std::move(basis), std::move(c));
}

double ModalField::eval(double x, double y) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < basis_->size(); ++k) {
    acc += coeffs_[k] * basis_->value(k, x, y);
  }
  return acc;
}

Eigen::Vector2d ModalField::eval_gradient(double x, double y) const {
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  for (std::size_t k = 0; k < basis_->size(); ++k) {
    acc += coeffs_[k] * basis_->gradient(k, x, y);
  }
  return acc;
}

ModalField semigroup_propagate(const ModalField& field, double t) {
  if (t < 0.0) throw std::invalid_argument("semigroup_propagate: t must be >= 0");
  const Eigen::VectorXd& lam = field.basis()->eigenvalues();
  Eigen::VectorXd out(field.coeffs().size());
  kernels::exp_scale(out.data(), field.coeffs().data(), lam.data(), t,
                     static_cast<std::size_t>(out.size()));
  return ModalField(field.basis(), std::move(out));
}

ModalField project(const Profile& profile, const BasisPtr& basis,
                   const QuadratureRule& rule) {
  if (!profile.value || !profile.gradient) {
    throw std::invalid_argument("project: profile needs value and gradient");
  }
  const int min_points = 3 * std::max(basis->n_max(), basis->m_max());
  if (rule.area_points_per_axis < min_points) {
    throw std::invalid_argument(
        "project: quadrature too coarse for the truncation (need >= 3 * max "
        "mode index points per axis)");
  }
  const RectDomain& dom = basis->domain();
  AreaRule area = tensor_rule(0.0, dom.a1, 0.0, dom.a2, rule.area_points_per_axis);
  const std::size_t nn = static_cast<std::size_t>(area.w.size());

  Eigen::ArrayXd fv(nn), fgx(nn), fgy(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    fv[i] = profile.value(area.x[i], area.y[i]);
    Eigen::Vector2d g = profile.gradient(area.x[i], area.y[i]);
    fgx[i] = g.x();
    fgy[i] = g.y();
  }

  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(basis->size()));
  Eigen::ArrayXd pv(nn), pgx(nn), pgy(nn);
  for (std::size_t k = 0; k < basis->size(); ++k) {
    basis->values_at(k, area.x.data(), area.y.data(), pv.data(), nn);
    basis->gradients_at(k, area.x.data(), area.y.data(), pgx.data(), pgy.data(), nn);
    coeffs[k] = kernels::weighted_dot(area.w.data(), pv.data(), fv.data(), nn) +
                kernels::weighted_dot(area.w.data(), pgx.data(), fgx.data(), nn) +
                kernels::weighted_dot(area.w.data(), pgy.data(), fgy.data(), nn);
  }
  return ModalField(basis, std::move(coeffs));
}

}  // namespace gradobs
