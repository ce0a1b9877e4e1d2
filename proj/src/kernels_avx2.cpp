#include "gradobs/kernels.hpp"

#if defined(GRADOBS_BUILD_AVX2)

#include <immintrin.h>

#include <cmath>

namespace gradobs::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

/* exp(x) for 4 doubles, Cephes-style rational approximation after
   range reduction x = n*log(2) + r.  Max error ~2 ulp on the normal
   range; inputs below -708 flush to zero (the subnormal range is not
   needed here: these are decaying modal factors). */
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

  const __m256d lo_cut = _mm256_set1_pd(-708.0);
  const __m256d hi_cut = _mm256_set1_pd(709.0);
  __m256d underflow = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo_cut), hi_cut);

  /* n = round(x / log 2) */
  __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  /* r = x - n*log(2), split constant for accuracy */
  __m256d r = _mm256_fnmadd_pd(n, c1, xc);
  r = _mm256_fnmadd_pd(n, c2, r);

  __m256d rr = _mm256_mul_pd(r, r);
  __m256d pn = _mm256_fmadd_pd(p0, rr, p1);
  pn = _mm256_fmadd_pd(pn, rr, p2);
  pn = _mm256_mul_pd(pn, r);
  __m256d qn = _mm256_fmadd_pd(q0, rr, q1);
  qn = _mm256_fmadd_pd(qn, rr, q2);
  qn = _mm256_fmadd_pd(qn, rr, q3);
  __m256d e = _mm256_div_pd(pn, _mm256_sub_pd(qn, pn));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  /* scale by 2^n via the exponent field */
  __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256i expo = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(expo));

  return _mm256_andnot_pd(underflow, e);
}

}  // namespace

void exp_scale(double* dst, const double* coeff, const double* lam, double t,
               std::size_t n) {
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d e = exp_pd(_mm256_mul_pd(_mm256_loadu_pd(lam + i), vt));
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(coeff + i), e));
  }
  for (; i < n; ++i) {
    dst[i] = coeff[i] * std::exp(lam[i] * t);
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) {
    y[i] += a * x[i];
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double out = hsum(acc);
  for (; i < n; ++i) {
    out += a[i] * b[i];
  }
  return out;
}

double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), ab, acc);
  }
  double out = hsum(acc);
  for (; i < n; ++i) {
    out += w[i] * a[i] * b[i];
  }
  return out;
}

double weighted_norm2_sq(const double* w, const double* vx, const double* vy,
                         std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(vx + i);
    __m256d y = _mm256_loadu_pd(vy + i);
    __m256d sq = _mm256_fmadd_pd(y, y, _mm256_mul_pd(x, x));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), sq, acc);
  }
  double out = hsum(acc);
  for (; i < n; ++i) {
    out += w[i] * (vx[i] * vx[i] + vy[i] * vy[i]);
  }
  return out;
}

}  // namespace gradobs::kernels::avx2

#endif  // GRADOBS_BUILD_AVX2
