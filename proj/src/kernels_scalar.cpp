#include "gradobs/kernels.hpp"

#include <cmath>

namespace gradobs::kernels::scalar {

void exp_scale(double* dst, const double* coeff, const double* lam, double t,
               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = coeff[i] * std::exp(lam[i] * t);
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += w[i] * a[i] * b[i];
  }
  return acc;
}

double weighted_norm2_sq(const double* w, const double* vx, const double* vy,
                         std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += w[i] * (vx[i] * vx[i] + vy[i] * vy[i]);
  }
  return acc;
}

}  // namespace gradobs::kernels::scalar
