#include "rmt/freeprob.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmt/errors.hpp"
#include "rmt/kernels.hpp"

namespace rmt {

namespace {

struct MPMap {
  cd value;
  cd derivative;
};

MPMap mp_map(const Spectrum& spec, double c, cd z, cd t) {
  const auto s = kernels::pole_sums(spec.lambdas(), spec.weights(), 1.0, t);
  const double M = static_cast<double>(spec.dimension());
  const cd D = z - c * s.r1 / M;
  // d(sum lambda/(1 + lambda t))/dt = -sum lambda^2/(1 + lambda t)^2
  const cd dD = c * s.r2_sq / M;
  return {-1.0 / D, dD / (D * D)};
}

}  // namespace

MPValue solve_t_mp(const Spectrum& spec, const ModelParams& params, cd z, const SolverConfig& cfg) {
  if (z.imag() == 0.0) throw InputError("solve_t_mp requires Im z != 0");
  if (z.imag() < 0.0) {
    MPValue up = solve_t_mp(spec, params, std::conj(z), cfg);
    return {z, std::conj(up.t_mp), up.residual};
  }
  const double c = params.c;
  auto accept = [&](cd t, double res) { return res <= cfg.tol * std::max(1.0, std::abs(t)) && t.imag() > 0.0; };

  cd t = -1.0 / z;
  double res = INFINITY;
  double gamma = std::clamp(cfg.damping, 1.0 / 64.0, 1.0);
  double prev = INFINITY;
  const int budget = cfg.newton_fallback ? std::min(cfg.max_iter, 2000) : cfg.max_iter;
  for (int it = 0; it < budget; ++it) {
    const cd F = mp_map(spec, c, z, t).value;
    res = std::abs(t - F);
    if (accept(t, res)) return {z, t, res};
    if (res > prev && (gamma *= 0.5) < 1.0 / 64.0) break;
    prev = res;
    t = (1.0 - gamma) * t + gamma * F;
    if (t.imag() <= 0.0) t = {t.real(), std::abs(t.imag()) * 1e-3 + 1e-300};
  }
  if (cfg.newton_fallback) {
    for (int it = 0; it < 100; ++it) {
      const auto m = mp_map(spec, c, z, t);
      const cd h = t - m.value;
      res = std::abs(h);
      if (accept(t, res)) return {z, t, res};
      const cd next = t - h / (1.0 - m.derivative);
      if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
      t = next.imag() > 0.0 ? next : cd(next.real(), std::abs(next.imag()) * 1e-3 + 1e-300);
    }
  }
  throw SolverError("Marchenko-Pastur equation did not converge", t, res);
}

double check_g_identity(const Spectrum& spec, const ModelParams& params, cd z, cd t) {
  const double c = params.c;
  const cd g = -c * t;
  // 1 - lambda g / (1 - z g^2) = 1 + b lambda
  const cd b = -g / (1.0 - z * g * g);
  const auto s = kernels::pole_sums(spec.lambdas(), spec.weights(), 1.0, b);
  const cd rhs = c * s.r1 / (z * static_cast<double>(spec.dimension()));
  return std::abs(g - rhs);
}

TildeFResiduals check_tilde_f_identity(const ModelParams& params, cd z, cd t, cd tnu) {
  const double c = params.c;
  const cd g = -c * t;
  const cd tilde_f = 1.0 / (z * z * g * g - z);
  const cd closed = -1.0 / (z * (1.0 - z * (c * t) * (c * t)));
  const cd reconstructed = (tilde_f + (1.0 - c) / z) / c;
  return {std::abs(tilde_f - closed), std::abs(reconstructed - tnu)};
}

MPEdges mp_support_scalar(double sigma2, double c) {
  const double r = std::sqrt(c);
  return {sigma2 * (1.0 - r) * (1.0 - r), sigma2 * (1.0 + r) * (1.0 + r)};
}

}  // namespace rmt
