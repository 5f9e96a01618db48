#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "rmt/model.hpp"

namespace rmt {

enum class EdgeKind { LeftEdge, RightEdge };

struct CriticalPoint {
  double w;
  double x;  // phi(w)
  EdgeKind kind;
};

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Roots and critical points of phi(w) = c w^2 m_R(w) (c m_R(w) - 1).
struct PhiLandscape {
  std::vector<double> omega_roots;  // m_R(w) = 1/c, ascending
  std::vector<double> mu_roots;     // m_R(w) = 0, ascending
  /// Critical points inside the windows (lambda_(j), mu_j) where m_R < 0,
  /// ascending in w; they come in (local min, local max) pairs.
  std::vector<CriticalPoint> extrema;
  /// Window indices (0-based, ascending eigenvalue order) where a pair of
  /// extrema is close to merging and the gap count is not trustworthy.
  std::vector<std::size_t> near_degenerate;
  double w_plus = 0.0;
  double x_plus = 0.0;
  std::optional<double> w_minus;
  std::optional<double> x_minus;
};

/// Support of nu_N: optional atom at zero plus disjoint closed intervals.
struct SupportSet {
  std::optional<double> atom_at_zero;
  std::vector<Interval> intervals;
  std::vector<CriticalPoint> critical_points;
  std::vector<std::size_t> near_degenerate;

  /// Distance from x to S (including {0} when the atom is present).
  double distance(double x) const;
  bool contains(double x) const { return distance(x) == 0.0; }
  double right_edge() const { return intervals.back().hi; }
};

cd phi(const Spectrum& spec, const ModelParams& params, cd w);
/// Closed-form derivative of phi on the real axis.
double phi_prime(const Spectrum& spec, const ModelParams& params, double w);

/// omega and mu roots only.
PhiLandscape find_roots(const Spectrum& spec, const ModelParams& params);
/// Adds the window extrema, w_+ / x_+ and (c > 1) w_- / x_-.
PhiLandscape find_extrema(const Spectrum& spec, const ModelParams& params, PhiLandscape landscape);
SupportSet assemble_support(const Spectrum& spec, const ModelParams& params, const PhiLandscape& landscape);

/// find_roots + find_extrema + assemble_support.
SupportSet compute_support(const Spectrum& spec, const ModelParams& params);

/// |lambda_k - lambda_l| <= kappa sqrt(|k - l| / M) for every pair of the
/// multiplicity-expanded, sorted eigenvalue list.
bool single_interval_condition(const Spectrum& spec, double kappa);

/// Closed forms for R = sigma2 I.
struct ScalarEdges {
  double w_plus;
  double x_plus;
};
ScalarEdges scalar_edges(double sigma2, double c);

nlohmann::json to_json(const SupportSet& s);
SupportSet support_from_json(const nlohmann::json& j);

}  // namespace rmt
