#include "rmt/kernels.hpp"

namespace rmt::kernels::detail {

PoleSums pole_sums_scalar(const double* lambda, const double* weight, std::size_t n,
                          std::complex<double> a, std::complex<double> b) {
  PoleSums s;
  for (std::size_t l = 0; l < n; ++l) {
    const double lam = lambda[l];
    const double w = weight[l];
    const std::complex<double> inv = 1.0 / (a + b * lam);
    const std::complex<double> inv2 = inv * inv;
    s.r0 += w * inv;
    s.r1 += w * lam * inv;
    s.r1_sq += w * lam * inv2;
    s.r2_sq += w * lam * lam * inv2;
    s.r2_abs += w * lam * lam * std::norm(inv);
  }
  return s;
}

}  // namespace rmt::kernels::detail
