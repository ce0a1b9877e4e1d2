#include "gradobs/kernels.hpp"

#include <stdexcept>

namespace gradobs::kernels {

namespace {

struct Vtable {
  void (*exp_scale)(double*, const double*, const double*, double, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*weighted_dot)(const double*, const double*, const double*, std::size_t);
  double (*weighted_norm2_sq)(const double*, const double*, const double*, std::size_t);
};

constexpr Vtable kScalar{scalar::exp_scale, scalar::axpy, scalar::dot,
                         scalar::weighted_dot, scalar::weighted_norm2_sq};

#if defined(GRADOBS_BUILD_AVX2)
constexpr Vtable kAvx2{avx2::exp_scale, avx2::axpy, avx2::dot,
                       avx2::weighted_dot, avx2::weighted_norm2_sq};
#endif

Backend g_backend = detected_backend();
const Vtable* g_vtable = nullptr;

const Vtable* vtable_for(Backend backend) {
#if defined(GRADOBS_BUILD_AVX2)
  if (backend == Backend::Avx2) return &kAvx2;
#endif
  (void)backend;
  return &kScalar;
}

const Vtable& active() {
  if (!g_vtable) g_vtable = vtable_for(g_backend);
  return *g_vtable;
}

}  // namespace

bool avx2_available() {
#if defined(GRADOBS_BUILD_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detected_backend() {
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

Backend active_backend() { return g_backend; }

void set_backend(Backend backend) {
  if (backend == Backend::Avx2 && !avx2_available()) {
    throw std::invalid_argument("kernels: AVX2 backend not available on this CPU");
  }
  g_backend = backend;
  g_vtable = vtable_for(backend);
}

const char* backend_name(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

void exp_scale(double* dst, const double* coeff, const double* lam, double t,
               std::size_t n) {
  active().exp_scale(dst, coeff, lam, t, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy(a, x, y, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}

double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n) {
  return active().weighted_dot(w, a, b, n);
}

double weighted_norm2_sq(const double* w, const double* vx, const double* vy,
                         std::size_t n) {
  return active().weighted_norm2_sq(w, vx, vy, n);
}

}  // namespace gradobs::kernels
