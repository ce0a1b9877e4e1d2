#pragma once

#include <cstddef>

// Numeric kernels behind the hot loops: semigroup propagation, quadrature
// reductions and the boundary-trace matvec.  Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2/FMA variant.  The backend
// is picked once per process from CPU capabilities; tests can force either
// one to check equivalence.

namespace gradobs::kernels {

enum class Backend { Scalar, Avx2 };

bool avx2_available();
Backend detected_backend();
Backend active_backend();
// Throws std::invalid_argument if the requested backend is not available.
void set_backend(Backend backend);
const char* backend_name(Backend backend);

// dst[i] = coeff[i] * exp(lam[i] * t)
void exp_scale(double* dst, const double* coeff, const double* lam, double t,
               std::size_t n);
// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);
// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);
// sum_i w[i] * a[i] * b[i]
double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n);
// sum_i w[i] * (vx[i]^2 + vy[i]^2)
double weighted_norm2_sq(const double* w, const double* vx, const double* vy,
                         std::size_t n);

namespace scalar {
void exp_scale(double* dst, const double* coeff, const double* lam, double t,
               std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n);
double weighted_norm2_sq(const double* w, const double* vx, const double* vy,
                         std::size_t n);
}  // namespace scalar

#if defined(GRADOBS_BUILD_AVX2)
namespace avx2 {
void exp_scale(double* dst, const double* coeff, const double* lam, double t,
               std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n);
double weighted_norm2_sq(const double* w, const double* vx, const double* vy,
                         std::size_t n);
}  // namespace avx2
#endif

}  // namespace gradobs::kernels
