#pragma once

// Weighted pole sums over a spectrum: the one inner loop every trace
// functional in this library reduces to. A scalar reference and SIMD variants
// (AVX2 on x86-64, NEON on aarch64) are selected once at runtime.

#include <complex>
#include <span>
#include <string_view>

namespace rmt::kernels {

/// With d_l = a + b * lambda_l and weights w_l:
///   r0      = sum w_l / d_l
///   r1      = sum w_l lambda_l / d_l
///   r1_sq   = sum w_l lambda_l / d_l^2
///   r2_sq   = sum w_l lambda_l^2 / d_l^2
///   r2_abs  = sum w_l lambda_l^2 / |d_l|^2
struct PoleSums {
  std::complex<double> r0{};
  std::complex<double> r1{};
  std::complex<double> r1_sq{};
  std::complex<double> r2_sq{};
  double r2_abs = 0.0;
};

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b) noexcept;

/// True if the variant was compiled in and the CPU supports it.
bool backend_available(Backend b) noexcept;

/// Backend used by pole_sums(). Chosen at first use: the best available one,
/// unless the RMT_SIMD environment variable names another ("scalar", "avx2",
/// "neon").
Backend active_backend() noexcept;

/// Overrides the runtime choice (tests, benchmarks). Ignored if unavailable.
void force_backend(Backend b) noexcept;

PoleSums pole_sums(std::span<const double> lambda, std::span<const double> weight,
                   std::complex<double> a, std::complex<double> b);

PoleSums pole_sums_with(Backend backend, std::span<const double> lambda,
                        std::span<const double> weight, std::complex<double> a,
                        std::complex<double> b);

namespace detail {
using PoleSumsFn = PoleSums (*)(const double*, const double*, std::size_t,
                                std::complex<double>, std::complex<double>);

PoleSums pole_sums_scalar(const double* lambda, const double* weight, std::size_t n,
                          std::complex<double> a, std::complex<double> b);
#if defined(RMT_HAVE_AVX2)
PoleSums pole_sums_avx2(const double* lambda, const double* weight, std::size_t n,
                        std::complex<double> a, std::complex<double> b);
#endif
#if defined(__aarch64__)
PoleSums pole_sums_neon(const double* lambda, const double* weight, std::size_t n,
                        std::complex<double> a, std::complex<double> b);
#endif
}  // namespace detail

}  // namespace rmt::kernels
