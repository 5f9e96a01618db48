#include "rmt/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace rmt::kernels {

namespace {

bool cpu_has(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(RMT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend pick_default() noexcept {
  if (const char* env = std::getenv("RMT_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::Scalar;
    if (v == "avx2" && cpu_has(Backend::Avx2)) return Backend::Avx2;
    if (v == "neon" && cpu_has(Backend::Neon)) return Backend::Neon;
  }
  if (cpu_has(Backend::Avx2)) return Backend::Avx2;
  if (cpu_has(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

std::atomic<int>& active_slot() {
  static std::atomic<int> slot{static_cast<int>(pick_default())};
  return slot;
}

detail::PoleSumsFn resolve(Backend b) noexcept {
  switch (b) {
#if defined(RMT_HAVE_AVX2)
    case Backend::Avx2:
      return &detail::pole_sums_avx2;
#endif
#if defined(__aarch64__)
    case Backend::Neon:
      return &detail::pole_sums_neon;
#endif
    default:
      return &detail::pole_sums_scalar;
  }
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) noexcept { return cpu_has(b); }

Backend active_backend() noexcept { return static_cast<Backend>(active_slot().load()); }

void force_backend(Backend b) noexcept {
  if (cpu_has(b)) active_slot().store(static_cast<int>(b));
}

PoleSums pole_sums_with(Backend backend, std::span<const double> lambda,
                        std::span<const double> weight, std::complex<double> a,
                        std::complex<double> b) {
  if (lambda.size() != weight.size()) {
    throw std::invalid_argument("pole_sums: lambda/weight length mismatch");
  }
  if (!cpu_has(backend)) backend = Backend::Scalar;
  return resolve(backend)(lambda.data(), weight.data(), lambda.size(), a, b);
}

PoleSums pole_sums(std::span<const double> lambda, std::span<const double> weight,
                   std::complex<double> a, std::complex<double> b) {
  return pole_sums_with(active_backend(), lambda, weight, a, b);
}

}  // namespace rmt::kernels
