#include "rmt/solver.hpp"

#include <algorithm>
#include <cmath>

#include "rmt/errors.hpp"
#include "rmt/kernels.hpp"

namespace rmt {

namespace {

constexpr double kDenominatorFloor = 1e-300;
constexpr double kMinDamping = 1.0 / 64.0;
constexpr int kNewtonIters = 100;
constexpr int kMaxBranchReflections = 20;

bool in_branch(cd z, cd t) { return t.imag() > 0.0 && (z * t).imag() > 0.0; }

double scaled(double residual, cd t) { return residual / std::max(1.0, std::abs(t)); }

// Keeps iterates in the Herglotz half-plane: Im t <= 0 is reflected to a
// small positive value.
cd reflect(cd t) {
  if (t.imag() > 0.0) return t;
  return {t.real(), std::max(std::abs(t.imag()) * 1e-3, 1e-300)};
}

struct Attempt {
  cd t;
  double residual;
  bool converged;
};

Attempt iterate(const Spectrum& spec, double c, cd z, const SolverConfig& cfg, cd start) {
  cd t = reflect(start);
  cd best_t = t;
  double best_res = INFINITY;
  double prev_res = INFINITY;
  double checkpoint_res = INFINITY;
  double gamma = std::clamp(cfg.damping, kMinDamping, 1.0);
  const int budget = cfg.newton_fallback ? std::min(cfg.max_iter, 2000) : cfg.max_iter;

  for (int it = 0; it < budget; ++it) {
    const cd F = canonical_map(spec, c, z, t).value;
    const double res = std::abs(t - F);
    if (!std::isfinite(res)) break;
    if (res < best_res) {
      best_res = res;
      best_t = t;
    }
    if (scaled(res, t) <= cfg.tol && in_branch(z, t)) return {t, res, true};
    if (res > prev_res) {
      gamma *= 0.5;
      if (gamma < kMinDamping) break;
    }
    prev_res = res;
    // slow contraction near the support: hand over to Newton
    if (cfg.newton_fallback && it > 0 && it % 50 == 0) {
      if (best_res > 0.5 * checkpoint_res) break;
      checkpoint_res = best_res;
    }
    t = reflect((1.0 - gamma) * t + gamma * F);
  }
  if (!cfg.newton_fallback) return {best_t, best_res, false};

  t = best_t;
  double res = best_res;
  int reflections = 0;
  for (int it = 0; it < kNewtonIters; ++it) {
    const auto m = canonical_map(spec, c, z, t);
    const cd h = t - m.value;
    res = std::abs(h);
    if (scaled(res, t) <= cfg.tol && in_branch(z, t)) return {t, res, true};
    const cd slope = 1.0 - m.derivative;
    if (std::abs(slope) == 0.0) break;
    cd step = h / slope;
    cd next = t - step;
    double next_res = std::abs(next - canonical_map(spec, c, z, next).value);
    for (int k = 0; k < 30 && !(next_res < res); ++k) {
      step *= 0.5;
      next = t - step;
      next_res = std::abs(next - canonical_map(spec, c, z, next).value);
    }
    if (!(next_res < res) && scaled(res, t) > 1e3 * cfg.tol) break;
    if (!(next_res <= res)) {
      // stagnated at rounding level
      return {t, res, scaled(res, t) <= 10.0 * cfg.tol && in_branch(z, t)};
    }
    if (!in_branch(z, next)) {
      if (++reflections > kMaxBranchReflections) break;
      next = reflect(next);
    }
    t = next;
  }
  return {t, res, false};
}

}  // namespace

CanonicalMap canonical_map(const Spectrum& spec, double c, cd z, cd t) {
  const cd zc2t2 = z * c * c * t * t;
  cd D = 1.0 - zc2t2;
  if (std::abs(D) < kDenominatorFloor) D = D == 0.0 ? cd(kDenominatorFloor) : D / std::abs(D) * kDenominatorFloor;
  const cd alpha = c * t / D;
  const auto s = kernels::pole_sums(spec.lambdas(), spec.weights(), 1.0, alpha);
  const double M = static_cast<double>(spec.dimension());
  const cd dalpha = c * (1.0 + zc2t2) / (D * D);
  return {-s.r1 / (z * M), s.r2_sq / (z * M) * dalpha};
}

StieltjesValue complete_value(const Spectrum& spec, const ModelParams& params, cd z, cd t) {
  const double c = params.c;
  StieltjesValue sv;
  sv.z = z;
  sv.t = t;
  sv.residual = std::abs(t - canonical_map(spec, c, z, t).value);
  const cd D = 1.0 - z * c * c * t * t;
  sv.tnu = -1.0 / z - c * t * t / D;
  sv.w = z * c * t - 1.0 / (c * t);
  sv.branch_ok = in_branch(z, t);
  return sv;
}

StieltjesValue solve_t(const Spectrum& spec, const ModelParams& params, cd z, const SolverConfig& cfg,
                       std::optional<cd> warm_start) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw InputError("solver config: need tol > 0, max_iter >= 1");
  if (z.imag() == 0.0) throw InputError("solve_t requires Im z != 0; use t_boundary on the real axis");
  if (z.imag() < 0.0) {
    std::optional<cd> warm;
    if (warm_start) warm = std::conj(*warm_start);
    StieltjesValue up = solve_t(spec, params, std::conj(z), cfg, warm);
    up.z = z;
    up.t = std::conj(up.t);
    up.tnu = std::conj(up.tnu);
    up.w = std::conj(up.w);
    return up;
  }
  const double c = params.c;
  const cd start = warm_start.value_or(-1.0 / z);
  Attempt a = iterate(spec, c, z, cfg, start);
  if (!a.converged && warm_start) a = iterate(spec, c, z, cfg, -1.0 / z);

  if (!a.converged && cfg.newton_fallback) {
    // Homotopy in Im z from far above the axis, where the iteration contracts.
    const double target = z.imag();
    double y = std::max(4.0 * target, 1.0 + std::abs(z));
    Attempt far = iterate(spec, c, {z.real(), y}, cfg, -1.0 / cd(z.real(), y));
    double ratio = 0.5;
    int refinements = 0;
    while (far.converged && y > target && refinements < 12) {
      const double y_next = std::max(target, y * ratio);
      Attempt step = iterate(spec, c, {z.real(), y_next}, cfg, far.t);
      if (step.converged) {
        far = step;
        y = y_next;
        ratio = std::min(0.5, ratio * ratio);
      } else {
        ratio = std::sqrt(ratio);
        ++refinements;
      }
    }
    if (far.converged && y == target) a = far;
  }
  if (!a.converged) {
    throw SolverError("canonical equation did not converge at z = (" + std::to_string(z.real()) + ", " +
                          std::to_string(z.imag()) + ")",
                      a.t, a.residual);
  }
  StieltjesValue sv = complete_value(spec, params, z, a.t);
  if (!sv.branch_ok) throw SolverError("solution left the Herglotz branch", sv.t, sv.residual);
  return sv;
}

std::optional<StieltjesValue> polish_t(const Spectrum& spec, const ModelParams& params, cd z, cd start,
                                       const SolverConfig& cfg) {
  const double c = params.c;
  cd t = start;
  double res = INFINITY;
  for (int it = 0; it < kNewtonIters; ++it) {
    const auto m = canonical_map(spec, c, z, t);
    const cd h = t - m.value;
    const double r = std::abs(h);
    if (!std::isfinite(r)) return std::nullopt;
    if (scaled(r, t) <= cfg.tol) return complete_value(spec, params, z, t);
    if (it > 3 && !(r < res)) {
      // rounding floor
      if (scaled(res, t) <= 10.0 * cfg.tol) return complete_value(spec, params, z, t);
      return std::nullopt;
    }
    res = r;
    const cd slope = 1.0 - m.derivative;
    if (std::abs(slope) == 0.0) return std::nullopt;
    t -= h / slope;
  }
  return std::nullopt;
}

std::vector<cd> T_diag(const Spectrum& spec, const ModelParams& params, const StieltjesValue& sv) {
  const double c = params.c;
  const cd D = 1.0 - sv.z * c * c * sv.t * sv.t;
  if (std::abs(D) < kDenominatorFloor) throw NumericError("T_diag: degenerate 1 - z (c t)^2");
  const cd alpha = c * sv.t / D;
  std::vector<cd> out;
  out.reserve(spec.distinct());
  for (double lam : spec.lambdas()) {
    const cd denom = sv.z * (1.0 + alpha * lam);
    if (denom == 0.0) throw NumericError("T_diag: singular diagonal entry");
    out.push_back(-1.0 / denom);
  }
  return out;
}

UVDiagnostics uv_diagnostics(const Spectrum& spec, const ModelParams& params, const StieltjesValue& sv) {
  const double c = params.c;
  const cd ct = c * sv.t;
  const double D2 = std::norm(1.0 - sv.z * ct * ct);
  const cd alpha = ct / (1.0 - sv.z * ct * ct);
  const auto s = kernels::pole_sums(spec.lambdas(), spec.weights(), 1.0, alpha);
  // (1/M) Tr(R T T^* R) with T_l = -1/(z (1 + alpha lambda_l))
  const double trRTTR = s.r2_abs / (static_cast<double>(spec.dimension()) * std::norm(sv.z));
  UVDiagnostics d;
  d.u = c * std::norm(sv.z * ct) * trRTTR / D2;
  d.v = c * trRTTR / D2;
  d.det = (1.0 - d.u) * (1.0 - d.u) - std::norm(sv.z) * d.v * d.v;
  return d;
}

}  // namespace rmt
