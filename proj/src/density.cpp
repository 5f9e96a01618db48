#include "rmt/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "rmt/errors.hpp"
#include "rmt/parallel.hpp"

namespace rmt {

namespace {

constexpr double kClampTol = 1e-6;
constexpr double kLogRefineFloor = 1e-8;
constexpr double kEpsRatio = 0.31622776601683794;  // 10^{-1/2}

double clamp_density(double v, const char* which, double x) {
  if (v >= 0.0) return v;
  if (v < -kClampTol) {
    throw NumericError(std::string(which) + " density negative (" + std::to_string(v) + ") at x = " +
                       std::to_string(x) + ": branch failure");
  }
  return 0.0;
}

// Second-order Richardson extrapolation of t(eps) = t0 + a eps + b eps^2
// from three iterates at eps, r eps, r^2 eps (latest last).
cd richardson(cd t0, cd t1, cd t2) {
  const double r = kEpsRatio;
  const cd e1 = (t1 - r * t0) / (1.0 - r);
  const cd e2 = (t2 - r * t1) / (1.0 - r);
  return (e2 - r * r * e1) / (1.0 - r * r);
}

// Walks one step of the continuation, preferring a single Newton polish from
// the previous value and falling back to the full solver.
StieltjesValue continuation_step(const Spectrum& spec, const ModelParams& params, cd z, cd warm,
                                 const SolverConfig& cfg) {
  if (auto p = polish_t(spec, params, z, warm, cfg); p && p->branch_ok) return *p;
  return solve_t(spec, params, z, cfg, warm);
}

}  // namespace

cd t_boundary(const Spectrum& spec, const ModelParams& params, double x, const SolverConfig& cfg,
              const BoundaryOptions& opts) {
  if (x == 0.0 || !std::isfinite(x)) throw InputError("t_boundary requires a finite nonzero x");
  std::vector<cd> raw;
  cd extrapolant{};
  cd prev_extrapolant{};
  bool have_extrapolant = false;
  double eps = 1e-2;
  cd t{};
  for (int k = 0; eps >= opts.eps_floor; ++k, eps = std::pow(10.0, -2.0 - 0.5 * k)) {
    try {
      const StieltjesValue sv =
          k == 0 ? solve_t(spec, params, {x, eps}, cfg) : continuation_step(spec, params, {x, eps}, t, cfg);
      t = sv.t;
    } catch (const SolverError& e) {
      throw NumericError("t_boundary: continuation diverged at x = " + std::to_string(x) +
                         ", eps = " + std::to_string(eps) + " (last t = " + std::to_string(e.last_iterate().real()) +
                         " + " + std::to_string(e.last_iterate().imag()) + "i)");
    }
    raw.push_back(t);
    if (raw.size() >= 3) {
      prev_extrapolant = extrapolant;
      extrapolant = richardson(raw[raw.size() - 3], raw[raw.size() - 2], raw.back());
      if (have_extrapolant &&
          std::abs(extrapolant - prev_extrapolant) < opts.stop_tol * std::max(1.0, std::abs(extrapolant))) {
        break;
      }
      have_extrapolant = true;
    }
  }
  cd result = have_extrapolant ? extrapolant : t;
  if (result.imag() < 0.0) result = t;

  // real-axis Newton polish; the conjugate root is equally valid on the axis
  if (auto p = polish_t(spec, params, {x, 0.0}, result, cfg)) {
    cd polished = p->t;
    polished = {polished.real(), std::abs(polished.imag())};
    if (std::abs(polished - result) <= 1e-3 * std::max(1.0, std::abs(result))) result = polished;
  }
  return result;
}

double density_mu_from_t(double x, cd t) { return clamp_density(t.imag() / std::numbers::pi, "mu", x); }

double density_nu_from_t(const ModelParams& params, double x, cd t) {
  const double c = params.c;
  const cd ct = c * t;
  const double v = -c * (t * t).imag() / (std::numbers::pi * std::norm(1.0 - x * ct * ct));
  return clamp_density(v, "nu", x);
}

double density_nu_via_tnu(const ModelParams& params, double x, cd t) {
  const double c = params.c;
  const cd tnu = -1.0 / x - c * t * t / (1.0 - x * c * c * t * t);
  return tnu.imag() / std::numbers::pi;
}

double density_mu(const Spectrum& spec, const ModelParams& params, double x, const SolverConfig& cfg,
                  const BoundaryOptions& opts) {
  if (!(x > 0.0)) throw InputError("density_mu requires x > 0");
  return density_mu_from_t(x, t_boundary(spec, params, x, cfg, opts));
}

double density_nu(const Spectrum& spec, const ModelParams& params, double x, const SolverConfig& cfg,
                  const BoundaryOptions& opts) {
  if (!(x > 0.0)) throw InputError("density_nu requires x > 0");
  return density_nu_from_t(params, x, t_boundary(spec, params, x, cfg, opts));
}

double atom_delta(const Spectrum& spec, const ModelParams& params) {
  const double c = params.c;
  if (c <= 1.0) return 0.0;
  // m_R increases from 0 to 1 on (-inf, 0], so for c > 1 the root
  // w = c delta of c m_R(w) = 1 is unique and negative
  auto gap = [&](double w) { return c * trace_resolvent(spec, w).real() - 1.0; };
  double lo = -1.0;
  for (int k = 0; k < 200 && gap(lo) >= 0.0; ++k) lo *= 2.0;
  double hi = 0.0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    if (gap(mid) < 0.0) lo = mid; else hi = mid;
  }
  const double w = std::abs(gap(lo)) <= std::abs(gap(hi)) ? lo : hi;
  return w / c;
}

DensityCurve build_curve(const Spectrum& spec, const ModelParams& params, const SupportSet& support,
                         int points_per_interval, const SolverConfig& cfg, const BoundaryOptions& opts) {
  if (points_per_interval < 8) throw InputError("build_curve needs at least 8 points per interval");
  if (support.intervals.empty()) throw InputError("build_curve: empty support");
  const std::size_t n = static_cast<std::size_t>(points_per_interval);
  const double first = support.intervals.front().lo;
  const double last = support.intervals.back().hi;
  const double margin = 0.1 * (last - first);

  std::vector<double> grid;
  for (const auto& iv : support.intervals) {
    for (std::size_t k = 1; k < n; ++k) {
      const double s = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
      grid.push_back(iv.lo + (iv.hi - iv.lo) * s);
    }
    if (iv.lo == 0.0) {
      const double top = iv.hi * 0.5 * (1.0 - std::cos(std::numbers::pi / static_cast<double>(n)));
      const std::size_t n_log = std::max<std::size_t>(40, n / 4);
      const double a = std::log10(kLogRefineFloor), b = std::log10(top);
      for (std::size_t k = 0; k < n_log; ++k) {
        grid.push_back(std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(n_log)));
      }
    }
  }
  // margins and gaps, where the density vanishes
  const std::size_t n_out = std::max<std::size_t>(8, n / 10);
  auto fill = [&](double a, double b) {
    for (std::size_t k = 1; k < n_out; ++k) grid.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(n_out));
  };
  if (first > 0.0) fill(std::max(0.0, first - margin), first);
  for (std::size_t i = 0; i + 1 < support.intervals.size(); ++i) {
    fill(support.intervals[i].hi, support.intervals[i + 1].lo);
  }
  fill(last, last + margin);

  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  grid.erase(std::remove_if(grid.begin(), grid.end(),
                            [&](double x) {
                              if (!(x > 0.0)) return true;
                              for (const auto& iv : support.intervals) {
                                if (x == iv.lo || x == iv.hi) return true;
                              }
                              return false;
                            }),
             grid.end());

  return evaluate_curve(spec, params, support, std::move(grid), cfg, opts);
}

DensityCurve evaluate_curve(const Spectrum& spec, const ModelParams& params, const SupportSet& support,
                            std::vector<double> grid, const SolverConfig& cfg, const BoundaryOptions& opts) {
  for (double x : grid) {
    if (!std::isfinite(x) || x == 0.0) throw InputError("density grid points must be finite and nonzero");
  }
  DensityCurve curve;
  curve.support = support;
  curve.grid = std::move(grid);
  const std::size_t n = curve.grid.size();
  curve.f.resize(n);
  curve.g.resize(n);
  curve.t_boundary.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const double x = curve.grid[i];
    const cd t = t_boundary(spec, params, x, cfg, opts);
    curve.t_boundary[i] = t;
    curve.f[i] = density_mu_from_t(x, t);
    curve.g[i] = density_nu_from_t(params, x, t);
  });
  const double delta = atom_delta(spec, params);
  curve.atom_mu = 0.0 - delta;
  curve.atom_nu = params.c > 1.0 ? 1.0 - 1.0 / params.c : 0.0;
  return curve;
}

namespace {

// Density restricted to one support interval: nodes with the edge values,
// plus an optional power-law head A x^{-p} on [0, head_end] when the
// interval starts at an integrable blow-up at 0.
struct Piece {
  std::vector<double> x;
  std::vector<double> y;
  bool has_head = false;
  double head_A = 0.0;
  double head_p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

Piece make_piece(const DensityCurve& curve, const Interval& iv, Measure which) {
  const auto& vals = which == Measure::Mu ? curve.f : curve.g;
  Piece p;
  p.lo = iv.lo;
  p.hi = iv.hi;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    if (curve.grid[i] > iv.lo && curve.grid[i] < iv.hi) {
      xs.push_back(curve.grid[i]);
      ys.push_back(vals[i]);
    }
  }
  if (iv.lo > 0.0) {
    p.x.push_back(iv.lo);
    p.y.push_back(0.0);
    p.x.insert(p.x.end(), xs.begin(), xs.end());
    p.y.insert(p.y.end(), ys.begin(), ys.end());
  } else {
    // least-squares power law over the first 3 cells
    constexpr std::size_t kFit = 4;
    bool ok = xs.size() > kFit;
    double p_fit = 0.0, a_fit = 0.0;
    if (ok) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t k = 0; k < kFit; ++k) {
        if (!(ys[k] > 0.0)) ok = false;
        if (!ok) break;
        const double lx = std::log(xs[k]), ly = std::log(ys[k]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
      }
      if (ok) {
        const double n = static_cast<double>(kFit);
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        p_fit = -slope;
        a_fit = std::exp((sy - slope * sx) / n);
        ok = p_fit > 0.0 && p_fit < 1.0;
      }
    }
    if (ok) {
      p.has_head = true;
      p.head_A = a_fit;
      p.head_p = p_fit;
      p.x.assign(xs.begin() + (kFit - 1), xs.end());
      p.y.assign(ys.begin() + (kFit - 1), ys.end());
    } else {
      p.x.push_back(0.0);
      p.y.push_back(ys.empty() ? 0.0 : ys.front());
      p.x.insert(p.x.end(), xs.begin(), xs.end());
      p.y.insert(p.y.end(), ys.begin(), ys.end());
    }
  }
  p.x.push_back(iv.hi);
  p.y.push_back(0.0);
  return p;
}

// integral of x^k * density over one cell [a, b]; between two positive
// values the density is interpolated as a power law, which stays exact next
// to the x^{-p} blow-up at a hard edge; otherwise linearly
bool power_cell(double a, double fa, double fb) {
  return a > 0.0 && fa > 0.0 && fb > 0.0;
}

double interpolate(double a, double b, double fa, double fb, double x) {
  if (power_cell(a, fa, fb)) return fa * std::pow(x / a, std::log(fb / fa) / std::log(b / a));
  return fa + (fb - fa) * (x - a) / (b - a);
}

double cell_integral(double a, double b, double fa, double fb, int k) {
  if (b <= a) return 0.0;
  if (power_cell(a, fa, fb)) {
    const double q = std::log(fb / fa) / std::log(b / a);
    const double e = q + static_cast<double>(k) + 1.0;
    const double ga = fa * std::pow(a, k), gb = fb * std::pow(b, k);
    if (std::abs(e) < 1e-9) return a * ga * std::log(b / a);
    return (b * gb - a * ga) / e;
  }
  const double ga = k == 0 ? fa : a * fa;
  const double gb = k == 0 ? fb : b * fb;
  return 0.5 * (ga + gb) * (b - a);
}

// integral of x^k * density over [piece.lo, x]
double cumulative(const Piece& p, int k, double x) {
  if (x <= p.lo) return 0.0;
  x = std::min(x, p.hi);
  double acc = 0.0;
  const double head_end = p.has_head ? p.x.front() : p.lo;
  if (p.has_head) {
    const double e = static_cast<double>(k) + 1.0 - p.head_p;
    acc += p.head_A * std::pow(std::min(x, head_end), e) / e;
    if (x <= head_end) return acc;
  }
  for (std::size_t i = 0; i + 1 < p.x.size(); ++i) {
    const double a = p.x[i], b = p.x[i + 1];
    if (a >= x) break;
    if (b <= x) {
      acc += cell_integral(a, b, p.y[i], p.y[i + 1], k);
    } else {
      acc += cell_integral(a, x, p.y[i], interpolate(a, b, p.y[i], p.y[i + 1], x), k);
    }
  }
  return acc;
}

double mass_between(const DensityCurve& curve, Measure which, int k, double lo, double hi) {
  double acc = 0.0;
  for (const auto& iv : curve.support.intervals) {
    if (hi <= iv.lo || lo >= iv.hi) continue;
    const Piece p = make_piece(curve, iv, which);
    acc += cumulative(p, k, hi) - cumulative(p, k, lo);
  }
  return acc;
}

}  // namespace

MeasureIntegrals integrate_curve(const DensityCurve& curve) {
  const double lo = curve.support.intervals.front().lo;
  const double hi = curve.support.intervals.back().hi;
  return {mass_between(curve, Measure::Mu, 0, lo, hi), mass_between(curve, Measure::Nu, 0, lo, hi),
          mass_between(curve, Measure::Mu, 1, lo, hi)};
}

double continuous_mass(const DensityCurve& curve, Measure which, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return mass_between(curve, which, 0, lo, hi);
}

void write_curve_csv(const DensityCurve& curve, std::ostream& out) {
  out << "x,f_mu,g_nu\n";
  out.precision(17);
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out << curve.grid[i] << ',' << curve.f[i] << ',' << curve.g[i] << '\n';
  }
}

nlohmann::json curve_sidecar(const DensityCurve& curve) {
  return {{"atom_mu", curve.atom_mu}, {"atom_nu", curve.atom_nu}, {"support", to_json(curve.support)},
          {"points", curve.grid.size()}};
}

}  // namespace rmt
