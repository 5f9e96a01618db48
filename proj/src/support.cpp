#include "rmt/support.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmt/errors.hpp"
#include "rmt/kernels.hpp"

namespace rmt {

namespace {

constexpr std::size_t kWindowGrid = 2048;
constexpr int kGridRefinements = 3;
constexpr double kExtremumTol = 1e-13;

struct TraceAt {
  double m;       // m_R(w)
  double mprime;  // m_R'(w)
};

TraceAt trace_at(const Spectrum& spec, double w) {
  const auto s = kernels::pole_sums(spec.lambdas(), spec.weights(), -w, 1.0);
  const double M = static_cast<double>(spec.dimension());
  return {s.r1.real() / M, s.r1_sq.real() / M};
}

double phi_prime_from(double c, double w, TraceAt tr) {
  return c * (2.0 * w * tr.m * (c * tr.m - 1.0) + w * w * tr.mprime * (2.0 * c * tr.m - 1.0));
}

// Root of an increasing function on the open interval (lo, hi); the
// endpoints may be poles and are never evaluated.
template <class F>
double bisect_increasing(F&& f, double lo, double hi) {
  bool lo_eval = false, hi_eval = false;
  double f_lo = 0.0, f_hi = 0.0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (fm < 0.0) {
      lo = mid;
      f_lo = fm;
      lo_eval = true;
    } else {
      hi = mid;
      f_hi = fm;
      hi_eval = true;
    }
  }
  if (lo_eval && hi_eval) return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
  return lo_eval ? lo : hi;
}

// Sign-change bisection on [lo, hi] where sign(g(lo)) != sign(g(hi)).
template <class G>
double bisect_sign(G&& g, double lo, double hi, double tol) {
  const bool lo_negative = g(lo) < 0.0;
  for (int it = 0; it < 2000 && hi - lo > tol; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    if ((g(mid) < 0.0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

std::vector<double> window_grid(double left, double right, std::size_t n) {
  // half log-spaced toward the pole at `left`, half uniform
  std::vector<double> s;
  s.reserve(n);
  const std::size_t n_log = n / 2;
  const std::size_t n_lin = n - n_log;
  for (std::size_t k = 0; k < n_log; ++k) {
    const double e = -10.0 + 10.0 * static_cast<double>(k) / static_cast<double>(n_log);
    s.push_back(std::pow(10.0, e) * 0.5);
  }
  for (std::size_t k = 0; k < n_lin; ++k) {
    s.push_back(0.5 + 0.5 * static_cast<double>(k) / static_cast<double>(n_lin));
  }
  std::vector<double> w;
  w.reserve(n);
  for (double v : s) {
    const double x = left + (right - left) * v;
    if (x > left && x < right && (w.empty() || x > w.back())) w.push_back(x);
  }
  return w;
}

}  // namespace

double SupportSet::distance(double x) const {
  double d = atom_at_zero ? std::abs(x) : INFINITY;
  for (const auto& iv : intervals) {
    if (iv.contains(x)) return 0.0;
    d = std::min(d, x < iv.lo ? iv.lo - x : x - iv.hi);
  }
  return d;
}

cd phi(const Spectrum& spec, const ModelParams& params, cd w) {
  const double c = params.c;
  const cd m = trace_resolvent(spec, w);
  return c * w * w * m * (c * m - 1.0);
}

double phi_prime(const Spectrum& spec, const ModelParams& params, double w) {
  for (double lam : spec.lambdas()) {
    if (w == lam) throw NumericError("phi_prime evaluated at an eigenvalue of R");
  }
  return phi_prime_from(params.c, w, trace_at(spec, w));
}

PhiLandscape find_roots(const Spectrum& spec, const ModelParams& params) {
  const double c = params.c;
  const double inv_c = 1.0 / c;
  std::vector<double> asc(spec.lambdas().rbegin(), spec.lambdas().rend());
  auto m_of = [&](double w) { return trace_at(spec, w).m; };

  PhiLandscape out;
  // leftmost omega root, below the smallest eigenvalue
  if (c <= 1.0) {
    out.omega_roots.push_back(bisect_increasing([&](double w) { return m_of(w) - inv_c; }, 0.0, asc[0]));
    if (c == 1.0) out.omega_roots.back() = std::max(0.0, out.omega_roots.back());
  } else {
    double lo = -1.0;
    int expansions = 0;
    while (m_of(lo) - inv_c >= 0.0) {
      lo *= 2.0;
      if (++expansions > 200) throw NumericError("find_roots: failed to bracket omega_1");
    }
    out.omega_roots.push_back(bisect_increasing([&](double w) { return m_of(w) - inv_c; }, lo, 0.0));
  }
  for (std::size_t j = 0; j + 1 < asc.size(); ++j) {
    out.mu_roots.push_back(bisect_increasing(m_of, asc[j], asc[j + 1]));
    out.omega_roots.push_back(bisect_increasing([&](double w) { return m_of(w) - inv_c; }, asc[j], asc[j + 1]));
  }

  // omega_1 < lambda_min < mu_1 < omega_2 < ... < mu_{n-1} < omega_n < lambda_max
  for (std::size_t j = 0; j < asc.size(); ++j) {
    const bool ok = out.omega_roots[j] < asc[j] &&
                    (j + 1 == asc.size() || (asc[j] < out.mu_roots[j] && out.mu_roots[j] < out.omega_roots[j + 1]));
    if (!ok) throw NumericError("find_roots: failed bracketing in gap " + std::to_string(j));
  }
  return out;
}

PhiLandscape find_extrema(const Spectrum& spec, const ModelParams& params, PhiLandscape landscape) {
  const double c = params.c;
  const std::vector<double> asc(spec.lambdas().rbegin(), spec.lambdas().rend());
  const auto mom = moments(spec, params);
  const double scale = std::max(1.0, c * c * mom.trR);
  auto dphi = [&](double w) { return phi_prime_from(c, w, trace_at(spec, w)); };

  landscape.extrema.clear();
  landscape.near_degenerate.clear();
  for (std::size_t j = 0; j + 1 < asc.size(); ++j) {
    const double left = asc[j];
    const double right = landscape.mu_roots[j];
    std::size_t n = kWindowGrid;
    bool done = false;
    for (int attempt = 0; attempt <= kGridRefinements && !done; ++attempt, n *= 4) {
      const auto grid = window_grid(left, right, n);
      std::vector<double> values(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) values[k] = dphi(grid[k]);
      std::vector<std::size_t> changes;
      for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        if ((values[k] < 0.0) != (values[k + 1] < 0.0)) changes.push_back(k);
      }
      if (changes.size() % 2 != 0) continue;
      done = true;
      for (std::size_t p = 0; p < changes.size(); p += 2) {
        const std::size_t k_min = changes[p], k_max = changes[p + 1];
        const double w_min = bisect_sign(dphi, grid[k_min], grid[k_min + 1], kExtremumTol);
        const double w_max = bisect_sign(dphi, grid[k_max], grid[k_max + 1], kExtremumTol);
        landscape.extrema.push_back({w_min, phi(spec, params, w_min).real(), EdgeKind::RightEdge});
        landscape.extrema.push_back({w_max, phi(spec, params, w_max).real(), EdgeKind::LeftEdge});
        double peak = 0.0;
        for (std::size_t k = k_min + 1; k <= k_max; ++k) peak = std::max(peak, std::abs(values[k]));
        if (peak < 1e-10 * scale) landscape.near_degenerate.push_back(j);
      }
    }
    if (!done) {
      throw NumericError("find_extrema: odd number of phi' sign changes in window " + std::to_string(j));
    }
  }

  // w_+ on (lambda_max, inf)
  const double top = asc.back();
  double lo = top * (1.0 + 1e-9);
  for (int k = 0; k < 40 && !(dphi(lo) < 0.0); ++k) lo = top + (lo - top) * 0.1;
  double hi = top + (spec.upper_bound() - spec.lower_bound()) + 1.0;
  for (int k = 0; k < 60 && !(dphi(hi) > 0.0); ++k) hi *= 2.0;
  if (!(dphi(lo) < 0.0 && dphi(hi) > 0.0)) throw NumericError("find_extrema: failed to bracket w_+");
  landscape.w_plus = bisect_sign(dphi, lo, hi, 0.0);
  landscape.x_plus = phi(spec, params, landscape.w_plus).real();

  landscape.w_minus.reset();
  landscape.x_minus.reset();
  if (c > 1.0) {
    const double omega1 = landscape.omega_roots.front();
    const double a = omega1 * (1.0 - 1e-9);
    const double b = -1e-15;
    if (!(dphi(a) > 0.0 && dphi(b) < 0.0)) throw NumericError("find_extrema: failed to bracket w_-");
    landscape.w_minus = bisect_sign(dphi, a, b, 0.0);
    landscape.x_minus = phi(spec, params, *landscape.w_minus).real();
  }

  if (spec.is_scalar()) {
    const auto cf = scalar_edges(spec.largest(), c);
    if (std::abs(landscape.w_plus - cf.w_plus) > 1e-10 * cf.w_plus ||
        std::abs(landscape.x_plus - cf.x_plus) > 1e-10 * cf.x_plus) {
      throw NumericError("find_extrema: numeric w_+/x_+ disagree with the scalar closed form");
    }
  }

  // edges must increase: x_- (or 0) < x_1^+ < x_2^- < ... < x_+
  double prev = landscape.x_minus.value_or(0.0);
  for (const auto& e : landscape.extrema) {
    if (!(e.x > prev)) throw NumericError("find_extrema: inconsistent ordering of critical values");
    prev = e.x;
  }
  if (!(landscape.x_plus > prev)) throw NumericError("find_extrema: x_+ below an interior edge");
  return landscape;
}

SupportSet assemble_support(const Spectrum&, const ModelParams& params, const PhiLandscape& landscape) {
  SupportSet s;
  std::vector<double> edges;
  if (params.c > 1.0) {
    if (!landscape.x_minus || !landscape.w_minus) throw NumericError("assemble_support: missing x_- for c > 1");
    s.atom_at_zero = 1.0 - 1.0 / params.c;
    edges.push_back(*landscape.x_minus);
    s.critical_points.push_back({*landscape.w_minus, *landscape.x_minus, EdgeKind::LeftEdge});
  } else {
    edges.push_back(0.0);
  }
  for (const auto& e : landscape.extrema) {
    edges.push_back(e.x);
    s.critical_points.push_back(e);
  }
  edges.push_back(landscape.x_plus);
  s.critical_points.push_back({landscape.w_plus, landscape.x_plus, EdgeKind::RightEdge});
  if (edges.size() % 2 != 0) throw NumericError("assemble_support: unpaired edge");
  for (std::size_t k = 0; k < edges.size(); k += 2) {
    if (!(edges[k] < edges[k + 1]) || (k > 0 && !(edges[k] > edges[k - 1]))) {
      throw NumericError("assemble_support: inconsistent interval ordering");
    }
    s.intervals.push_back({edges[k], edges[k + 1]});
  }
  s.near_degenerate = landscape.near_degenerate;
  return s;
}

SupportSet compute_support(const Spectrum& spec, const ModelParams& params) {
  auto land = find_roots(spec, params);
  land = find_extrema(spec, params, std::move(land));
  return assemble_support(spec, params, land);
}

bool single_interval_condition(const Spectrum& spec, double kappa) {
  if (!(kappa > 0.0)) throw InputError("kappa must be positive");
  const auto entries = spec.entries();
  const double M = static_cast<double>(spec.dimension());
  std::vector<std::int64_t> first(entries.size()), last(entries.size());
  std::int64_t pos = 1;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    first[i] = pos;
    pos += entries[i].multiplicity;
    last[i] = pos - 1;
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      // closest expanded indices give the binding constraint
      const double gap = static_cast<double>(first[j] - last[i]);
      if (entries[i].lambda - entries[j].lambda > kappa * std::sqrt(gap / M)) return false;
    }
  }
  return true;
}

ScalarEdges scalar_edges(double sigma2, double c) {
  const double s = 0.5 * (1.0 + std::sqrt(1.0 + 8.0 * c));
  const double g = 1.0 + 1.0 / s;
  return {sigma2 * (1.0 + s), sigma2 * sigma2 * c * g * g * (c + s)};
}

nlohmann::json to_json(const SupportSet& s) {
  nlohmann::json j;
  j["atom"] = s.atom_at_zero ? nlohmann::json(*s.atom_at_zero) : nlohmann::json(nullptr);
  j["intervals"] = nlohmann::json::array();
  for (const auto& iv : s.intervals) j["intervals"].push_back({iv.lo, iv.hi});
  j["critical_points"] = nlohmann::json::array();
  for (const auto& cp : s.critical_points) {
    j["critical_points"].push_back(
        {{"w", cp.w}, {"x", cp.x}, {"kind", cp.kind == EdgeKind::LeftEdge ? "left_edge" : "right_edge"}});
  }
  j["near_degenerate_windows"] = s.near_degenerate;
  return j;
}

SupportSet support_from_json(const nlohmann::json& j) {
  SupportSet s;
  try {
    if (!j.at("atom").is_null()) s.atom_at_zero = j.at("atom").get<double>();
    for (const auto& iv : j.at("intervals")) s.intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    if (j.contains("critical_points")) {
      for (const auto& cp : j["critical_points"]) {
        s.critical_points.push_back({cp.at("w").get<double>(), cp.at("x").get<double>(),
                                     cp.at("kind").get<std::string>() == "left_edge" ? EdgeKind::LeftEdge
                                                                                      : EdgeKind::RightEdge});
      }
    }
    if (j.contains("near_degenerate_windows")) {
      s.near_degenerate = j["near_degenerate_windows"].get<std::vector<std::size_t>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed support JSON: ") + e.what());
  }
  if (s.intervals.empty()) throw InputError("support JSON has no intervals");
  return s;
}

}  // namespace rmt
