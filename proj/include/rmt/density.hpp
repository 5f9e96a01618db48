#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "rmt/model.hpp"
#include "rmt/solver.hpp"
#include "rmt/support.hpp"

namespace rmt {

/// Controls the epsilon-continuation toward the real axis.
struct BoundaryOptions {
  double eps_floor = 1e-12;
  /// Stop once two successive extrapolants differ by less than this
  /// (relative to max(1, |t|)).
  double stop_tol = 1e-9;
};

/// t(x) = lim t(x + i eps), eps -> 0+, for real x != 0.
///
/// Walks eps_k = 10^{-2-k/2} with warm starts, Richardson-extrapolates the
/// last three iterates and polishes the extrapolant with Newton on the real
/// axis. Throws NumericError if the continuation diverges.
cd t_boundary(const Spectrum& spec, const ModelParams& params, double x, const SolverConfig& cfg = {},
              const BoundaryOptions& opts = {});

/// f(x) = Im t(x) / pi for the continuous part of mu_N.
double density_mu(const Spectrum& spec, const ModelParams& params, double x, const SolverConfig& cfg = {},
                  const BoundaryOptions& opts = {});
/// g(x) = -(1/pi) c Im(t(x)^2) / |1 - x (c t(x))^2|^2 for nu_N.
double density_nu(const Spectrum& spec, const ModelParams& params, double x, const SolverConfig& cfg = {},
                  const BoundaryOptions& opts = {});

/// g from a known boundary value t(x). Clamps rounding-level negatives.
double density_nu_from_t(const ModelParams& params, double x, cd t);
/// (1/pi) Im t_nu(x) computed through t_nu = -1/x - c t^2 / (1 - x c^2 t^2),
/// without clamping. Used as an independent route to g.
double density_nu_via_tnu(const ModelParams& params, double x, cd t);
/// f from a known boundary value. Clamps rounding-level negatives.
double density_mu_from_t(double x, cd t);

/// delta < 0 solving 1 = c (1/M) Tr R (R - c delta I)^{-1} when c > 1, else 0.
/// mu({0}) = -delta.
double atom_delta(const Spectrum& spec, const ModelParams& params);

struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> f;
  std::vector<double> g;
  std::vector<cd> t_boundary;
  double atom_mu = 0.0;
  double atom_nu = 0.0;
  SupportSet support;
};

/// Samples f and g on an edge-clustered grid covering every support
/// interval, with a 10% margin outside and log-spaced refinement toward 0
/// when 0 belongs to the support.
DensityCurve build_curve(const Spectrum& spec, const ModelParams& params, const SupportSet& support,
                         int points_per_interval, const SolverConfig& cfg = {},
                         const BoundaryOptions& opts = {});

/// Samples f and g at caller-chosen points (nonzero, any order).
DensityCurve evaluate_curve(const Spectrum& spec, const ModelParams& params, const SupportSet& support,
                            std::vector<double> grid, const SolverConfig& cfg = {},
                            const BoundaryOptions& opts = {});

enum class Measure { Mu, Nu };

struct MeasureIntegrals {
  double mass_mu;          // continuous part only
  double mass_nu;          // continuous part only
  double first_moment_mu;  // integral of x f(x)
};

MeasureIntegrals integrate_curve(const DensityCurve& curve);

/// Continuous mass of mu or nu over [lo, hi].
double continuous_mass(const DensityCurve& curve, Measure which, double lo, double hi);

void write_curve_csv(const DensityCurve& curve, std::ostream& out);
nlohmann::json curve_sidecar(const DensityCurve& curve);

}  // namespace rmt
