// NEON variant, two lanes of float64. Built only on aarch64.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "rmt/kernels.hpp"

namespace rmt::kernels::detail {

PoleSums pole_sums_neon(const double* lambda, const double* weight, std::size_t n,
                        std::complex<double> a, std::complex<double> b) {
  const float64x2_t a_re = vdupq_n_f64(a.real());
  const float64x2_t a_im = vdupq_n_f64(a.imag());
  const float64x2_t b_re = vdupq_n_f64(b.real());
  const float64x2_t b_im = vdupq_n_f64(b.imag());
  const float64x2_t one = vdupq_n_f64(1.0);

  float64x2_t r0_re = vdupq_n_f64(0.0), r0_im = vdupq_n_f64(0.0);
  float64x2_t r1_re = vdupq_n_f64(0.0), r1_im = vdupq_n_f64(0.0);
  float64x2_t r1s_re = vdupq_n_f64(0.0), r1s_im = vdupq_n_f64(0.0);
  float64x2_t r2s_re = vdupq_n_f64(0.0), r2s_im = vdupq_n_f64(0.0);
  float64x2_t r2a = vdupq_n_f64(0.0);

  std::size_t l = 0;
  for (; l + 2 <= n; l += 2) {
    const float64x2_t lam = vld1q_f64(lambda + l);
    const float64x2_t w = vld1q_f64(weight + l);
    const float64x2_t d_re = vfmaq_f64(a_re, b_re, lam);
    const float64x2_t d_im = vfmaq_f64(a_im, b_im, lam);
    const float64x2_t inv_norm =
        vdivq_f64(one, vfmaq_f64(vmulq_f64(d_im, d_im), d_re, d_re));
    const float64x2_t q_re = vmulq_f64(d_re, inv_norm);
    const float64x2_t q_im = vnegq_f64(vmulq_f64(d_im, inv_norm));
    const float64x2_t q2_re = vfmsq_f64(vmulq_f64(q_re, q_re), q_im, q_im);
    const float64x2_t q2_im = vmulq_n_f64(vmulq_f64(q_re, q_im), 2.0);
    const float64x2_t wl = vmulq_f64(w, lam);
    const float64x2_t wll = vmulq_f64(wl, lam);

    r0_re = vfmaq_f64(r0_re, w, q_re);
    r0_im = vfmaq_f64(r0_im, w, q_im);
    r1_re = vfmaq_f64(r1_re, wl, q_re);
    r1_im = vfmaq_f64(r1_im, wl, q_im);
    r1s_re = vfmaq_f64(r1s_re, wl, q2_re);
    r1s_im = vfmaq_f64(r1s_im, wl, q2_im);
    r2s_re = vfmaq_f64(r2s_re, wll, q2_re);
    r2s_im = vfmaq_f64(r2s_im, wll, q2_im);
    r2a = vfmaq_f64(r2a, wll, inv_norm);
  }

  PoleSums s;
  s.r0 = {vaddvq_f64(r0_re), vaddvq_f64(r0_im)};
  s.r1 = {vaddvq_f64(r1_re), vaddvq_f64(r1_im)};
  s.r1_sq = {vaddvq_f64(r1s_re), vaddvq_f64(r1s_im)};
  s.r2_sq = {vaddvq_f64(r2s_re), vaddvq_f64(r2s_im)};
  s.r2_abs = vaddvq_f64(r2a);

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

#endif  // __aarch64__
