// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime CPU check (see dispatch.cpp).

#include "cdlab/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace cdlab::kernels {
namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

double weighted_dot_avx2(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d wa0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    const __m256d wa1 = _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4));
    acc0 = _mm256_fmadd_pd(wa0, _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(wa1, _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    acc0 = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc0);
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += w[i] * a[i] * b[i];
  return sum;
}

double weighted_sum_avx2(const double* w, const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i), acc0);
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += w[i] * a[i];
  return sum;
}

void affine_combine_avx2(double* out, const double* x, const double* y, double a, double b,
                         std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), by));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void condense_avx2(const CondenseCoefficients& c, const double* value_n, const double* rate_n,
                   const double* residual, double* value_alpha, double* rate_alpha,
                   std::size_t n) {
  const __m256d vv = _mm256_set1_pd(c.value_value);
  const __m256d vr = _mm256_set1_pd(c.value_rate);
  const __m256d vs = _mm256_set1_pd(c.value_slope);
  const __m256d rv = _mm256_set1_pd(c.rate_value);
  const __m256d rr = _mm256_set1_pd(c.rate_rate);
  const __m256d rs = _mm256_set1_pd(c.rate_slope);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(value_n + i);
    const __m256d r = _mm256_loadu_pd(rate_n + i);
    const __m256d R = _mm256_loadu_pd(residual + i);
    __m256d out_v = _mm256_mul_pd(vs, R);
    out_v = _mm256_fmadd_pd(vr, r, out_v);
    out_v = _mm256_fmadd_pd(vv, v, out_v);
    __m256d out_r = _mm256_mul_pd(rs, R);
    out_r = _mm256_fmadd_pd(rr, r, out_r);
    out_r = _mm256_fmadd_pd(rv, v, out_r);
    _mm256_storeu_pd(value_alpha + i, out_v);
    _mm256_storeu_pd(rate_alpha + i, out_r);
  }
  for (; i < n; ++i) {
    value_alpha[i] = c.value_value * value_n[i] + c.value_rate * rate_n[i] + c.value_slope * residual[i];
    rate_alpha[i] = c.rate_value * value_n[i] + c.rate_rate * rate_n[i] + c.rate_slope * residual[i];
  }
}

void commit_avx2(const CommitCoefficients& c, double* value, double* rate, const double* residual,
                 std::size_t n) {
  const __m256d nv = _mm256_set1_pd(c.next_value);
  const __m256d nr = _mm256_set1_pd(c.next_rate);
  const __m256d ns = _mm256_set1_pd(c.next_slope);
  const __m256d g1 = _mm256_set1_pd(c.dt_one_minus_gamma);
  const __m256d g = _mm256_set1_pd(c.dt_gamma);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(value + i);
    const __m256d r = _mm256_loadu_pd(rate + i);
    const __m256d R = _mm256_loadu_pd(residual + i);
    __m256d next = _mm256_mul_pd(ns, R);
    next = _mm256_fmadd_pd(nr, r, next);
    next = _mm256_fmadd_pd(nv, v, next);
    __m256d updated = _mm256_fmadd_pd(g1, r, v);
    updated = _mm256_fmadd_pd(g, next, updated);
    _mm256_storeu_pd(value + i, updated);
    _mm256_storeu_pd(rate + i, next);
  }
  for (; i < n; ++i) {
    const double next = c.next_value * value[i] + c.next_rate * rate[i] + c.next_slope * residual[i];
    value[i] = value[i] + c.dt_one_minus_gamma * rate[i] + c.dt_gamma * next;
    rate[i] = next;
  }
}

constexpr KernelTable kAvx2{
    Backend::Avx2, weighted_dot_avx2, weighted_sum_avx2, affine_combine_avx2,
    condense_avx2, commit_avx2,
};

}  // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2; }

}  // namespace cdlab::kernels

#else

namespace cdlab::kernels {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace cdlab::kernels

#endif
