#pragma once

#include <optional>
#include <vector>

#include "rmt/model.hpp"

namespace rmt {

/// Controls the damped fixed-point iteration and its Newton fallback.
struct SolverConfig {
  /// Accept when |t - F(t)| <= tol * max(1, |t|).
  double tol = 1e-13;
  int max_iter = 10000;
  /// Initial damping of t <- (1 - g) t + g F(t); halved on residual increase.
  double damping = 1.0;
  bool newton_fallback = true;
};

/// A certified evaluation of the deterministic-equivalent transforms at z.
struct StieltjesValue {
  cd z;
  cd t;      // t_N(z), Stieltjes transform of mu_N
  cd tnu;    // t_nu(z), Stieltjes transform of nu_N
  cd w;      // w_N(z) = z c t - 1/(c t)
  double residual = 0.0;  // |t - F(t)|, absolute
  bool branch_ok = false; // Im t > 0 and Im(z t) > 0 (upper half-plane only)
};

/// Right-hand side of the canonical equation
///   F(t) = (1/M) sum_l m_l lambda_l [-z (1 + c t lambda_l / (1 - z c^2 t^2))]^{-1}
/// together with dF/dt.
struct CanonicalMap {
  cd value;
  cd derivative;
};
CanonicalMap canonical_map(const Spectrum& spec, double c, cd z, cd t);

/// Solves t = F(t) for the unique solution with Im t > 0 and Im(z t) > 0.
///
/// Lower half-plane arguments are handled by conjugation. Im z == 0 is
/// rejected (real-axis values come from t_boundary()). Throws SolverError on
/// non-convergence or persistent branch violation.
StieltjesValue solve_t(const Spectrum& spec, const ModelParams& params, cd z,
                       const SolverConfig& cfg = {}, std::optional<cd> warm_start = std::nullopt);

/// Newton on t = F(t) at an arbitrary (possibly real) z starting from `start`.
/// Returns nullopt if it does not converge. No branch selection is done.
std::optional<StieltjesValue> polish_t(const Spectrum& spec, const ModelParams& params, cd z,
                                       cd start, const SolverConfig& cfg = {});

/// Fills the derived fields (tnu, w, residual, branch flag) for a given t.
StieltjesValue complete_value(const Spectrum& spec, const ModelParams& params, cd z, cd t);

/// T_l = -[z (1 + c t lambda_l / (1 - z c^2 t^2))]^{-1}, one per distinct eigenvalue.
std::vector<cd> T_diag(const Spectrum& spec, const ModelParams& params, const StieltjesValue& sv);

struct UVDiagnostics {
  double u;
  double v;
  double det;  // (1 - u)^2 - |z|^2 v^2
};
UVDiagnostics uv_diagnostics(const Spectrum& spec, const ModelParams& params,
                             const StieltjesValue& sv);

}  // namespace rmt
