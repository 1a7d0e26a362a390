#include "transmission/kernels/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace transmission::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline __m256d vabs(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

inline __m256d vipow(__m256d base, unsigned p) {
  __m256d r = _mm256_set1_pd(1.0);
  while (p != 0) {
    if (p & 1u) r = _mm256_mul_pd(r, base);
    base = _mm256_mul_pd(base, base);
    p >>= 1u;
  }
  return r;
}

inline double ipow(double base, unsigned p) {
  double r = 1.0;
  while (p != 0) {
    if (p & 1u) r *= base;
    base *= base;
    p >>= 1u;
  }
  return r;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_sq_norm_avx2(const double* w, const double* u, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d uu = _mm256_loadu_pd(u + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), uu), uu, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * u[i] * u[i];
  return s;
}

double weighted_abs_sum_avx2(const double* w, const double* u, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), vabs(_mm256_loadu_pd(u + i)), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * std::abs(u[i]);
  return s;
}

double max_abs_avx2(const double* u, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, vabs(_mm256_loadu_pd(u + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::max(r, std::abs(u[i]));
  return r;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void odd_power_avx2(double coef, unsigned power, const double* u, double* out, std::size_t n) {
  const __m256d c = _mm256_set1_pd(coef);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d uu = _mm256_loadu_pd(u + i);
    const __m256d term = _mm256_mul_pd(_mm256_mul_pd(c, vipow(vabs(uu), power)), uu);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), term));
  }
  for (; i < n; ++i) out[i] += coef * ipow(std::abs(u[i]), power) * u[i];
}

void even_power_avx2(double coef, unsigned power, const double* u, double* out, std::size_t n) {
  const __m256d c = _mm256_set1_pd(coef);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d term = _mm256_mul_pd(c, vipow(vabs(_mm256_loadu_pd(u + i)), power));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), term));
  }
  for (; i < n; ++i) out[i] += coef * ipow(std::abs(u[i]), power);
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2",          dot_avx2,         weighted_sq_norm_avx2,
                                 weighted_abs_sum_avx2, max_abs_avx2, axpy_avx2,
                                 odd_power_avx2,  even_power_avx2};
  return &table;
}

}  // namespace transmission::kernels
