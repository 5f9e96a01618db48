#include "rmt/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "rmt/density.hpp"
#include "rmt/errors.hpp"
#include "rmt/freeprob.hpp"
#include "rmt/parallel.hpp"
#include "rmt/simulate.hpp"
#include "rmt/solver.hpp"
#include "rmt/support.hpp"

namespace rmt {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult at_most(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value <= tol, value, tol, std::move(detail)};
}

CheckResult failed(std::string name, const std::exception& e) {
  return {std::move(name), false, std::nan(""), 0.0, e.what()};
}

int curve_points(const VerifyOptions& opts) { return opts.scale == Scale::Paper ? 1600 : 400; }
int realizations(const VerifyOptions& opts) { return opts.scale == Scale::Paper ? 5 : 1; }

// off-support points in (0, inf): gaps first, the rest beyond the right edge
std::vector<double> off_support_points(const SupportSet& s, std::size_t count) {
  std::vector<Interval> gaps;
  if (s.intervals.front().lo > 0.0) gaps.push_back({0.0, s.intervals.front().lo});
  for (std::size_t i = 0; i + 1 < s.intervals.size(); ++i) {
    gaps.push_back({s.intervals[i].hi, s.intervals[i + 1].lo});
  }
  std::vector<double> xs;
  const std::size_t per_gap = gaps.empty() ? 0 : count / 2 / gaps.size();
  for (const auto& g : gaps) {
    for (std::size_t k = 1; k <= per_gap; ++k) {
      xs.push_back(g.lo + (g.hi - g.lo) * static_cast<double>(k) / static_cast<double>(per_gap + 1));
    }
  }
  const double edge = s.right_edge();
  const std::size_t rest = count - xs.size();
  for (std::size_t k = 1; k <= rest; ++k) {
    xs.push_back(edge * (1.0 + 0.02 * std::pow(100.0, static_cast<double>(k - 1) / static_cast<double>(rest))));
  }
  return xs;
}

std::vector<EmpiricalSpectrum> flagship_realizations(const VerifyOptions& opts) {
  const TestCase fs = flagship_case();
  std::vector<EmpiricalSpectrum> out;
  for (int k = 0; k < realizations(opts); ++k) {
    out.push_back(simulate_trial(fs.spectrum, fs.params, opts.seed, static_cast<std::uint64_t>(k)));
  }
  return out;
}

template <class Fn>
CriterionResult timed(int id, std::string title, Fn&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  body(r.checks);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

bool CriterionResult::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

TestCase flagship_case() {
  return {"cosine profile M=500 N=1500 L=2", Spectrum::cosine_profile(500), ModelParams::from_dims(500, 1500, 2)};
}

std::vector<TestCase> reference_cases() {
  return {
      {"R=I c=0.5", Spectrum::scalar(1.0), ModelParams::from_ratio(0.5)},
      {"two atoms {3,1} c=1", Spectrum::from_entries({{3.0, 1}, {1.0, 1}}), ModelParams::from_ratio(1.0)},
      flagship_case(),
  };
}

std::vector<cd> residual_grid() {
  std::vector<cd> zs;
  for (int i = 0; i < 10; ++i) {
    const double x = -2.0 + 10.0 * i / 9.0;
    for (int j = 0; j < 10; ++j) {
      const double y = std::pow(10.0, -3.0 + (std::log10(5.0) + 3.0) * j / 9.0);
      zs.emplace_back(x, y);
    }
  }
  return zs;
}

CriterionResult check_scalar_closed_form() {
  return timed(1, "scalar closed form for x_+ and w_+", [](std::vector<CheckResult>& out) {
    for (double sigma2 : {0.5, 1.0, 2.0}) {
      for (double c : {0.1, 2.0 / 3.0, 1.0, 2.0}) {
        const std::string name = "sigma2=" + fmt(sigma2) + " c=" + fmt(c);
        try {
          const Spectrum spec = Spectrum::scalar(sigma2);
          const ModelParams p = ModelParams::from_ratio(c);
          const PhiLandscape land = find_extrema(spec, p, find_roots(spec, p));
          const ScalarEdges ref = scalar_edges(sigma2, c);
          const double ew = std::abs(land.w_plus - ref.w_plus) / std::abs(ref.w_plus);
          const double ex = std::abs(land.x_plus - ref.x_plus) / std::abs(ref.x_plus);
          out.push_back(at_most(name, std::max(ew, ex), 1e-10,
                                "x_+=" + fmt(land.x_plus) + " w_+=" + fmt(land.w_plus)));
        } catch (const std::exception& e) {
          out.push_back(failed(name, e));
        }
      }
    }
  });
}

CriterionResult check_equation_residuals() {
  return timed(2, "canonical equation and inversion residuals", [](std::vector<CheckResult>& out) {
    const auto grid = residual_grid();
    for (const auto& tc : reference_cases()) {
      std::vector<double> res(grid.size()), inv(grid.size());
      try {
        parallel_for(grid.size(), [&](std::size_t i) {
          const StieltjesValue sv = solve_t(tc.spectrum, tc.params, grid[i]);
          res[i] = sv.residual;
          inv[i] = std::abs(phi(tc.spectrum, tc.params, sv.w) - grid[i]);
        });
      } catch (const std::exception& e) {
        out.push_back(failed(tc.name + ": solve", e));
        continue;
      }
      out.push_back(at_most(tc.name + ": |t - F(t)|", *std::max_element(res.begin(), res.end()), 1e-12));
      out.push_back(at_most(tc.name + ": |phi(w(z)) - z|", *std::max_element(inv.begin(), inv.end()), 1e-9));
    }
  });
}

CriterionResult check_measure_identities(const VerifyOptions& opts) {
  return timed(3, "mass and first moment of the density", [&](std::vector<CheckResult>& out) {
    auto cases = reference_cases();
    cases.push_back({"R=I c=2", Spectrum::scalar(1.0), ModelParams::from_ratio(2.0)});
    for (const auto& tc : cases) {
      try {
        const SupportSet s = compute_support(tc.spectrum, tc.params);
        const DensityCurve curve = build_curve(tc.spectrum, tc.params, s, curve_points(opts));
        const MeasureIntegrals I = integrate_curve(curve);
        const MomentSummary m = moments(tc.spectrum, tc.params);
        out.push_back(at_most(tc.name + ": mass of nu", std::abs(I.mass_nu + curve.atom_nu - 1.0), 1e-3));
        out.push_back(at_most(tc.name + ": mass of mu", std::abs(I.mass_mu + curve.atom_mu - m.trR), 1e-3));
        out.push_back(at_most(tc.name + ": first moment of mu", std::abs(I.first_moment_mu - m.first_moment_mu),
                              1e-3, "expected " + fmt(m.first_moment_mu)));
      } catch (const std::exception& e) {
        out.push_back(failed(tc.name, e));
      }
    }
  });
}

CriterionResult check_edge_asymptotics() {
  return timed(4, "density blow-up at the hard edge", [](std::vector<CheckResult>& out) {
    const double x = 1e-8;
    const Spectrum spec = Spectrum::scalar(1.0);
    for (double c : {0.5, 1.0}) {
      const ModelParams p = ModelParams::from_ratio(c);
      const std::string tag = "R=I c=" + fmt(c);
      try {
        const cd t = t_boundary(spec, p, x);
        const double f = density_mu_from_t(x, t);
        const double g = density_nu_from_t(p, x, t);
        const double inv = trace_inverse(spec);
        double scale, f_ref, g_ref;
        if (c < 1.0) {
          scale = std::sqrt(x);
          f_ref = 1.0 / (kPi * std::sqrt(c * (1.0 - c)));
          g_ref = inv / (kPi * std::sqrt(c * (1.0 - c)));
        } else {
          scale = std::pow(x, 2.0 / 3.0);
          f_ref = std::sqrt(3.0) / (2.0 * kPi) * std::pow(inv, -1.0 / 3.0);
          g_ref = std::sqrt(3.0) / (2.0 * kPi) * std::pow(inv, 2.0 / 3.0);
        }
        out.push_back(at_most(tag + ": f", std::abs(scale * f / f_ref - 1.0), 0.02,
                              "scaled f=" + fmt(scale * f) + " ref " + fmt(f_ref)));
        out.push_back(at_most(tag + ": g", std::abs(scale * g / g_ref - 1.0), 0.03,
                              "scaled g=" + fmt(scale * g) + " ref " + fmt(g_ref)));
      } catch (const std::exception& e) {
        out.push_back(failed(tag, e));
      }
    }
  });
}

CriterionResult check_atom(const VerifyOptions& opts) {
  return timed(5, "atom at zero", [&](std::vector<CheckResult>& out) {
    try {
      const double delta = atom_delta(Spectrum::scalar(1.0), ModelParams::from_ratio(2.0));
      out.push_back(at_most("R=I c=2: delta + 1/2", std::abs(delta + 0.5), 1e-13, "delta=" + fmt(delta)));
    } catch (const std::exception& e) {
      out.push_back(failed("R=I c=2: delta", e));
    }
    try {
      const ModelParams p = ModelParams::from_dims(200, 200, 2);
      const EmpiricalSpectrum es = simulate_trial(Spectrum::scalar(1.0, 200), p, opts.seed);
      const std::int64_t expected = p.M * p.L - p.N;
      const double frac = static_cast<double>(es.zero_count) / static_cast<double>(p.M * p.L);
      out.push_back({"M=200 L=2 N=200: zero eigenvalue count", es.zero_count == expected,
                     static_cast<double>(es.zero_count), static_cast<double>(expected),
                     "fraction " + fmt(frac) + " vs 1 - 1/c = " + fmt(1.0 - 1.0 / p.c)});
    } catch (const std::exception& e) {
      out.push_back(failed("M=200 L=2 N=200: zero eigenvalue count", e));
    }
  });
}

CriterionResult check_flagship(const VerifyOptions& opts) {
  return timed(6, "flagship realization against the support and density", [&](std::vector<CheckResult>& out) {
    const TestCase fs = flagship_case();
    try {
      const SupportSet s = compute_support(fs.spectrum, fs.params);
      const DensityCurve curve = build_curve(fs.spectrum, fs.params, s, curve_points(opts));
      const double lo = s.intervals.front().lo, hi = s.right_edge();
      const std::int64_t n = fs.params.M * fs.params.L;
      const double hist_tol = 5.0 / std::sqrt(static_cast<double>(n));
      const auto runs = flagship_realizations(opts);
      for (const auto& es : runs) {
        const std::string tag = "trial " + std::to_string(es.trial);
        const std::int64_t outside = outside_support_count(es, s, 0.05);
        out.push_back({tag + ": eigenvalues outside S + 0.05", outside == 0, static_cast<double>(outside), 0.0,
                       "largest " + fmt(es.eigenvalues.back()) + ", right edge " + fmt(hi)});
        const Histogram h = histogram(es, lo, hi, 50);
        double worst = 0.0;
        for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
          const double width = h.edges[b + 1] - h.edges[b];
          const double theory = continuous_mass(curve, Measure::Nu, h.edges[b], h.edges[b + 1]);
          worst = std::max(worst, std::abs(h.probability[b] - theory) / width);
        }
        out.push_back(at_most(tag + ": 50-bin histogram max density error", worst, hist_tol));
      }
    } catch (const std::exception& e) {
      out.push_back(failed("flagship", e));
    }
  });
}

CriterionResult check_stieltjes_oracle(const VerifyOptions& opts) {
  return timed(7, "empirical Stieltjes transform against t_nu", [&](std::vector<CheckResult>& out) {
    const TestCase fs = flagship_case();
    try {
      const double tol = 10.0 / static_cast<double>(fs.params.N);
      const auto runs = flagship_realizations(opts);
      for (cd z : {cd(1.0, 1.0), cd(0.5, 0.5), cd(3.0, 2.0)}) {
        const StieltjesValue sv = solve_t(fs.spectrum, fs.params, z);
        double worst = 0.0;
        for (const auto& es : runs) worst = std::max(worst, std::abs(empirical_stieltjes(es, z, false) - sv.tnu));
        out.push_back(at_most("z=" + fmt(z.real()) + "+" + fmt(z.imag()) + "i", worst, tol));
      }
    } catch (const std::exception& e) {
      out.push_back(failed("flagship", e));
    }
  });
}

CriterionResult check_free_probability(const VerifyOptions& opts) {
  return timed(8, "free-probability identities", [&](std::vector<CheckResult>& out) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> ux(-2.0, 8.0), uy(-3.0, std::log10(5.0));
    std::vector<cd> zs;
    for (int k = 0; k < 50; ++k) {
      const double x = ux(rng);
      zs.emplace_back(x, std::pow(10.0, uy(rng)));
    }
    for (const auto& tc : reference_cases()) {
      try {
        double g_res = 0.0, f_res = 0.0;
        for (cd z : zs) {
          const StieltjesValue sv = solve_t(tc.spectrum, tc.params, z);
          g_res = std::max(g_res, check_g_identity(tc.spectrum, tc.params, z, sv.t));
          const TildeFResiduals r = check_tilde_f_identity(tc.params, z, sv.t, sv.tnu);
          f_res = std::max({f_res, r.closed_form, r.tnu});
        }
        out.push_back(at_most(tc.name + ": g = -c t", g_res, 1e-9));
        out.push_back(at_most(tc.name + ": tilde f chain", f_res, 1e-9));
      } catch (const std::exception& e) {
        out.push_back(failed(tc.name, e));
      }
    }
    for (double c : {0.5, 2.0 / 3.0, 2.0}) {
      const std::string name = "R=I c=" + fmt(c) + ": MP closed form";
      try {
        const Spectrum spec = Spectrum::scalar(1.0);
        const ModelParams p = ModelParams::from_ratio(c);
        double worst = 0.0;
        for (cd z : zs) {
          // z t^2 + (z - c + 1) t + 1 = 0, root in the upper half-plane
          const cd b = z - c + 1.0;
          const cd disc = std::sqrt(b * b - 4.0 * z);
          cd root = (-b + disc) / (2.0 * z);
          if (root.imag() <= 0.0) root = (-b - disc) / (2.0 * z);
          const MPValue mp = solve_t_mp(spec, p, z);
          worst = std::max(worst, std::abs(mp.t_mp - root) / std::max(1.0, std::abs(root)));
        }
        out.push_back(at_most(name, worst, 1e-12));
      } catch (const std::exception& e) {
        out.push_back(failed(name, e));
      }
    }
  });
}

CriterionResult check_diagnostics() {
  return timed(9, "positivity diagnostics and Re t < 0 off the support", [](std::vector<CheckResult>& out) {
    const auto grid = residual_grid();
    auto cases = reference_cases();
    cases.push_back({"R=I c=2", Spectrum::scalar(1.0), ModelParams::from_ratio(2.0)});
    for (const auto& tc : cases) {
      try {
        std::vector<double> one_minus_u(grid.size()), det(grid.size());
        parallel_for(grid.size(), [&](std::size_t i) {
          const StieltjesValue sv = solve_t(tc.spectrum, tc.params, grid[i]);
          const UVDiagnostics d = uv_diagnostics(tc.spectrum, tc.params, sv);
          one_minus_u[i] = 1.0 - d.u;
          det[i] = d.det;
        });
        const double mu = *std::min_element(one_minus_u.begin(), one_minus_u.end());
        const double md = *std::min_element(det.begin(), det.end());
        out.push_back({tc.name + ": min 1 - u", mu > 0.0, mu, 0.0, {}});
        out.push_back({tc.name + ": min det", md > 0.0, md, 0.0, {}});

        const SupportSet s = compute_support(tc.spectrum, tc.params);
        const auto xs = off_support_points(s, 20);
        double max_re = -std::numeric_limits<double>::infinity(), max_im = 0.0;
        for (double x : xs) {
          const cd t = t_boundary(tc.spectrum, tc.params, x);
          max_re = std::max(max_re, t.real());
          max_im = std::max(max_im, std::abs(t.imag()));
        }
        out.push_back({tc.name + ": max Re t(x) over 20 off-support points", max_re < 0.0, max_re, 0.0, {}});
        out.push_back(at_most(tc.name + ": max |Im t(x)| off the support", max_im, 1e-8));
      } catch (const std::exception& e) {
        out.push_back(failed(tc.name, e));
      }
    }
  });
}

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
  switch (id) {
    case 1: return check_scalar_closed_form();
    case 2: return check_equation_residuals();
    case 3: return check_measure_identities(opts);
    case 4: return check_edge_asymptotics();
    case 5: return check_atom(opts);
    case 6: return check_flagship(opts);
    case 7: return check_stieltjes_oracle(opts);
    case 8: return check_free_probability(opts);
    case 9: return check_diagnostics();
    default: throw InputError("unknown criterion " + std::to_string(id));
  }
}

std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 9; ++id) out.push_back(run_criterion(id, opts));
  return out;
}

}  // namespace rmt
