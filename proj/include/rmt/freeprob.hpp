#pragma once

#include "rmt/model.hpp"
#include "rmt/solver.hpp"

namespace rmt {

/// Stieltjes transform of the Marchenko-Pastur-type limit of W_p^* W_p.
struct MPValue {
  cd z;
  cd t_mp;
  double residual = 0.0;
};

/// Solves t = -[z - c (1/M) sum_l m_l lambda_l / (1 + lambda_l t)]^{-1} on the
/// Herglotz branch (Im t > 0 for Im z > 0; conjugated below the axis).
MPValue solve_t_mp(const Spectrum& spec, const ModelParams& params, cd z, const SolverConfig& cfg = {});

/// |g - (1/z)(1/M) sum c m_l lambda_l / (1 - lambda_l g / (1 - z g^2))| with g = -c t.
double check_g_identity(const Spectrum& spec, const ModelParams& params, cd z, cd t);

struct TildeFResiduals {
  /// |(z^2 g^2 - z)^{-1} - (-1 / (z (1 - z (c t)^2)))|
  double closed_form;
  /// |(1/c)(tilde_f + (1 - c)/z) - t_nu|
  double tnu;
};
TildeFResiduals check_tilde_f_identity(const ModelParams& params, cd z, cd t, cd tnu);

/// Support [sigma2 (1 - sqrt c)^2, sigma2 (1 + sqrt c)^2] of the continuous
/// part of the Marchenko-Pastur law for R = sigma2 I.
struct MPEdges {
  double lo;
  double hi;
};
MPEdges mp_support_scalar(double sigma2, double c);

}  // namespace rmt
