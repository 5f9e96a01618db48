// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "rmt/kernels.hpp"

namespace rmt::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

PoleSums pole_sums_avx2(const double* lambda, const double* weight, std::size_t n,
                        std::complex<double> a, std::complex<double> b) {
  const __m256d a_re = _mm256_set1_pd(a.real());
  const __m256d a_im = _mm256_set1_pd(a.imag());
  const __m256d b_re = _mm256_set1_pd(b.real());
  const __m256d b_im = _mm256_set1_pd(b.imag());
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);

  __m256d r0_re = _mm256_setzero_pd(), r0_im = _mm256_setzero_pd();
  __m256d r1_re = _mm256_setzero_pd(), r1_im = _mm256_setzero_pd();
  __m256d r1s_re = _mm256_setzero_pd(), r1s_im = _mm256_setzero_pd();
  __m256d r2s_re = _mm256_setzero_pd(), r2s_im = _mm256_setzero_pd();
  __m256d r2a = _mm256_setzero_pd();

  std::size_t l = 0;
  for (; l + 4 <= n; l += 4) {
    const __m256d lam = _mm256_loadu_pd(lambda + l);
    const __m256d w = _mm256_loadu_pd(weight + l);
    const __m256d d_re = _mm256_fmadd_pd(b_re, lam, a_re);
    const __m256d d_im = _mm256_fmadd_pd(b_im, lam, a_im);
    const __m256d inv_norm =
        _mm256_div_pd(one, _mm256_fmadd_pd(d_re, d_re, _mm256_mul_pd(d_im, d_im)));
    // 1/d = conj(d) / |d|^2
    const __m256d q_re = _mm256_mul_pd(d_re, inv_norm);
    const __m256d q_im = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(d_im, inv_norm));
    // 1/d^2
    const __m256d q2_re = _mm256_fmsub_pd(q_re, q_re, _mm256_mul_pd(q_im, q_im));
    const __m256d q2_im = _mm256_mul_pd(two, _mm256_mul_pd(q_re, q_im));

    const __m256d wl = _mm256_mul_pd(w, lam);
    const __m256d wll = _mm256_mul_pd(wl, lam);

    r0_re = _mm256_fmadd_pd(w, q_re, r0_re);
    r0_im = _mm256_fmadd_pd(w, q_im, r0_im);
    r1_re = _mm256_fmadd_pd(wl, q_re, r1_re);
    r1_im = _mm256_fmadd_pd(wl, q_im, r1_im);
    r1s_re = _mm256_fmadd_pd(wl, q2_re, r1s_re);
    r1s_im = _mm256_fmadd_pd(wl, q2_im, r1s_im);
    r2s_re = _mm256_fmadd_pd(wll, q2_re, r2s_re);
    r2s_im = _mm256_fmadd_pd(wll, q2_im, r2s_im);
    r2a = _mm256_fmadd_pd(wll, inv_norm, r2a);
  }

  PoleSums s;
  s.r0 = {hsum(r0_re), hsum(r0_im)};
  s.r1 = {hsum(r1_re), hsum(r1_im)};
  s.r1_sq = {hsum(r1s_re), hsum(r1s_im)};
  s.r2_sq = {hsum(r2s_re), hsum(r2s_im)};
  s.r2_abs = hsum(r2a);

  if (l < n) {
    const PoleSums tail = pole_sums_scalar(lambda + l, weight + l, n - l, a, b);
    s.r0 += tail.r0;
    s.r1 += tail.r1;
    s.r1_sq += tail.r1_sq;
    s.r2_sq += tail.r2_sq;
    s.r2_abs += tail.r2_abs;
  }
  return s;
}

}  // namespace rmt::kernels::detail
