#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace mlqmc::kernels::detail {

namespace {

// Cephes-style exp: x = k ln2 + r, exp(r) from a Pade form, scaled by 2^k.
// Lanes below -708 return 0; callers only sum shifted values <= 0, where such
// terms are far below the rounding of the leading term exp(0) = 1.
inline __m256d exp_pd(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93145751953125E-1), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.42860682030941723212E-6), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000009E0));
  const __m256d e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), _mm256_div_pd(p, _mm256_sub_pd(q, p)),
                                    _mm256_set1_pd(1.0));

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  k64 = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  const __m256d out = _mm256_mul_pd(e, _mm256_castsi256_pd(k64));
  return _mm256_andnot_pd(underflow, out);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void gaussian_exponents_avx2(const double* centre, std::size_t width, const double* cols,
                             std::size_t stride, std::size_t count, double scale, double* out) {
  const __m256d neg_scale = _mm256_set1_pd(-scale);
  std::size_t m = 0;
  for (; m + 4 <= count; m += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < width; ++j) {
      const __m256d d = _mm256_sub_pd(_mm256_set1_pd(centre[j]), _mm256_loadu_pd(cols + j * stride + m));
      acc = _mm256_fmadd_pd(d, d, acc);
    }
    _mm256_storeu_pd(out + m, _mm256_mul_pd(acc, neg_scale));
  }
  for (; m < count; ++m) {
    double acc = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      const double d = centre[j] - cols[j * stride + m];
      acc = std::fma(d, d, acc);
    }
    out[m] = acc * -scale;
  }
}

double sum_exp_shifted_avx2(const double* v, std::size_t n, double shift) {
  const __m256d s = _mm256_set1_pd(shift);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i), s)));
    acc1 = _mm256_add_pd(acc1, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i + 4), s)));
  }
  double total = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) total += std::exp(v[i] - shift);
  return total;
}

double max_avx2(const double* v, std::size_t n) {
  if (n < 4) {
    double m = v[0];
    for (std::size_t i = 1; i < n; ++i) m = v[i] > m ? v[i] : m;
    return m;
  }
  __m256d acc = _mm256_loadu_pd(v);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(v + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = lanes[0];
  for (int k = 1; k < 4; ++k) m = lanes[k] > m ? lanes[k] : m;
  for (; i < n; ++i) m = v[i] > m ? v[i] : m;
  return m;
}

}  // namespace mlqmc::kernels::detail
