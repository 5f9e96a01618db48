// rmt-de: support, density, simulation and consistency checks for the
// deterministic equivalent of W_f W_p^* W_p W_f^*.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmt/density.hpp"
#include "rmt/errors.hpp"
#include "rmt/freeprob.hpp"
#include "rmt/report.hpp"
#include "rmt/simulate.hpp"
#include "rmt/solver.hpp"
#include "rmt/support.hpp"
#include "rmt/verify.hpp"

namespace {

using namespace rmt;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct SourceArgs {
  std::string spectrum_path;
  std::optional<double> scalar;
  bool figure = false;
  std::optional<double> c;
  std::optional<std::int64_t> M, N, L;
};

void add_source(CLI::App* cmd, SourceArgs& a) {
  cmd->add_option("--spectrum", a.spectrum_path, "CSV or JSON file with eigenvalues of R");
  cmd->add_option("--scalar", a.scalar, "R = sigma2 * I");
  cmd->add_flag("--figure-experiment", a.figure, "cosine profile, M=500, N=1500, L=2");
  cmd->add_option("--c", a.c, "ratio ML/N");
  cmd->add_option("--M", a.M, "dimension of the observations");
  cmd->add_option("--N", a.N, "number of samples");
  cmd->add_option("--L", a.L, "number of stacked lags");
}

struct Problem {
  Spectrum spectrum;
  ModelParams params;
  json echo;
};

// needs_dims: simulation needs (M, N, L); the limit objects only need c
Problem resolve(const SourceArgs& a, bool needs_dims) {
  const int sources = (a.spectrum_path.empty() ? 0 : 1) + (a.scalar ? 1 : 0) + (a.figure ? 1 : 0);
  if (sources != 1) throw InputError("give exactly one of --spectrum, --scalar, --figure-experiment");
  for (const auto& v : {a.M, a.N, a.L}) {
    if (v && *v <= 0) throw InputError("--M, --N and --L must be positive");
  }

  json echo;
  std::int64_t M = 0;
  std::optional<Spectrum> spec;
  if (a.figure) {
    M = a.M.value_or(500);
    spec = Spectrum::cosine_profile(M);
    echo["source"] = "figure-experiment";
  } else if (a.scalar) {
    if (!(*a.scalar > 0.0) || !std::isfinite(*a.scalar)) throw InputError("--scalar must be positive");
    M = a.M.value_or(1);
    if (needs_dims && !a.M) throw InputError("--scalar needs --M for simulation");
    spec = Spectrum::scalar(*a.scalar, M);
    echo["source"] = "scalar";
    echo["sigma2"] = *a.scalar;
  } else {
    spec = load_spectrum_file(a.spectrum_path);
    M = spec->dimension();
    if (a.M && *a.M != M) throw InputError("--M disagrees with the spectrum file dimension");
    echo["source"] = "spectrum";
    echo["spectrum"] = a.spectrum_path;
  }

  ModelParams params;
  std::int64_t N = a.N.value_or(0), L = a.L.value_or(0);
  if (a.figure) {
    N = a.N.value_or(1500);
    L = a.L.value_or(2);
  }
  if (N > 0 && L > 0) {
    params = ModelParams::from_dims(M, N, L);
    if (a.c && std::abs(*a.c - params.c) > 1e-12 * params.c) throw InputError("--c disagrees with M L / N");
  } else if (needs_dims) {
    throw InputError("simulation needs --N and --L");
  } else if (a.c) {
    if (!(*a.c > 0.0) || !std::isfinite(*a.c)) throw InputError("--c must be positive");
    params = ModelParams::from_ratio(*a.c);
  } else {
    throw InputError("give --c, or --N and --L");
  }
  echo["c"] = params.c;
  if (params.has_dims()) echo["dims"] = {{"M", params.M}, {"N", params.N}, {"L", params.L}};
  return {std::move(*spec), params, std::move(echo)};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw InputError("write to " + path + " failed");
}

std::string sidecar_path(const std::string& path) {
  std::filesystem::path p(path);
  p.replace_extension(".json");
  if (p.string() == path) p += ".meta.json";
  return p.string();
}

void print_checks(const RunReport& r) {
  for (const auto& c : r.checks) {
    std::cerr << (c.passed ? "  pass  " : "  FAIL  ") << c.name << "  value=" << c.value
              << " tol=" << c.tolerance;
    if (!c.detail.empty()) std::cerr << "  (" << c.detail << ")";
    std::cerr << '\n';
  }
}

RunReport cmd_support(const SourceArgs& src, const std::string& out_path) {
  RunReport r;
  r.command = "support";
  Problem pb = resolve(src, false);
  r.inputs = pb.echo;
  const SupportSet s = compute_support(pb.spectrum, pb.params);
  const json sj = to_json(s);
  if (!out_path.empty()) {
    write_file(out_path, sj.dump(2) + "\n");
    r.outputs.push_back(out_path);
  }
  r.result = sj;
  r.checks.push_back({"support is non-empty", !s.intervals.empty(), static_cast<double>(s.intervals.size()), 1.0,
                      {}});
  if (pb.params.c > 1.0) {
    const double expect = 1.0 - 1.0 / pb.params.c;
    const double got = s.atom_at_zero.value_or(-1.0);
    r.checks.push_back({"atom at zero equals 1 - 1/c", std::abs(got - expect) <= 1e-14, got, expect, {}});
  }
  std::cerr << "support: " << s.intervals.size() << " interval(s)";
  for (const auto& iv : s.intervals) std::cerr << " [" << iv.lo << ", " << iv.hi << "]";
  if (s.atom_at_zero) std::cerr << ", atom " << *s.atom_at_zero << " at 0";
  std::cerr << '\n';
  return r;
}

struct DensityArgs {
  std::string out;
  int points = 400;
  std::optional<double> xmin, xmax;
  double eps_floor = 1e-12;
};

RunReport cmd_density(const SourceArgs& src, const DensityArgs& a) {
  RunReport r;
  r.command = "density";
  Problem pb = resolve(src, false);
  r.inputs = pb.echo;
  r.inputs["points"] = a.points;
  r.inputs["eps_floor"] = a.eps_floor;
  if (a.out.empty()) throw InputError("density needs --out <csv>");
  if (a.points < 8) throw InputError("--points must be at least 8");
  if (!(a.eps_floor > 0.0 && a.eps_floor < 1e-2)) throw InputError("--eps-floor must lie in (0, 1e-2)");
  if (a.xmin.has_value() != a.xmax.has_value()) throw InputError("--xmin and --xmax go together");

  BoundaryOptions bopts;
  bopts.eps_floor = a.eps_floor;
  const SupportSet s = compute_support(pb.spectrum, pb.params);
  DensityCurve curve;
  if (a.xmin) {
    if (!(*a.xmin < *a.xmax)) throw InputError("--xmin must be below --xmax");
    r.inputs["xmin"] = *a.xmin;
    r.inputs["xmax"] = *a.xmax;
    std::vector<double> grid;
    for (int k = 0; k < a.points; ++k) {
      const double x = *a.xmin + (*a.xmax - *a.xmin) * k / (a.points - 1);
      if (x != 0.0) grid.push_back(x);
    }
    curve = evaluate_curve(pb.spectrum, pb.params, s, std::move(grid), {}, bopts);
  } else {
    curve = build_curve(pb.spectrum, pb.params, s, a.points, {}, bopts);
    const MeasureIntegrals I = integrate_curve(curve);
    const MomentSummary m = moments(pb.spectrum, pb.params);
    const double e_nu = std::abs(I.mass_nu + curve.atom_nu - 1.0);
    const double e_mu = std::abs(I.mass_mu + curve.atom_mu - m.trR);
    const double e_m1 = std::abs(I.first_moment_mu - m.first_moment_mu);
    r.checks.push_back({"mass of nu", e_nu <= 1e-3, e_nu, 1e-3, {}});
    r.checks.push_back({"mass of mu", e_mu <= 1e-3, e_mu, 1e-3, {}});
    r.checks.push_back({"first moment of mu", e_m1 <= 1e-3, e_m1, 1e-3, {}});
  }
  bool finite = true;
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    finite = finite && std::isfinite(curve.f[i]) && std::isfinite(curve.g[i]) && curve.f[i] >= 0.0 &&
             curve.g[i] >= 0.0;
  }
  r.checks.push_back({"densities finite and nonnegative", finite, finite ? 1.0 : 0.0, 1.0, {}});

  std::ostringstream csv;
  write_curve_csv(curve, csv);
  write_file(a.out, csv.str());
  const std::string side = sidecar_path(a.out);
  write_file(side, curve_sidecar(curve).dump(2) + "\n");
  r.outputs = {a.out, side};
  std::cerr << "density: " << curve.grid.size() << " points written to " << a.out << '\n';
  return r;
}

struct SimulateArgs {
  std::string out;
  std::string summary;
  int trials = 1;
  std::uint64_t seed = 1;
};

RunReport cmd_simulate(const SourceArgs& src, const SimulateArgs& a) {
  RunReport r;
  r.command = "simulate";
  Problem pb = resolve(src, true);
  r.inputs = pb.echo;
  r.inputs["trials"] = a.trials;
  r.inputs["seed"] = a.seed;
  if (a.out.empty()) throw InputError("simulate needs --out <csv>");
  if (a.trials < 1) throw InputError("--trials must be at least 1");

  std::optional<SupportSet> s;
  try {
    s = compute_support(pb.spectrum, pb.params);
  } catch (const NumericError& e) {
    std::cerr << "simulate: support unavailable (" << e.what() << "), outside counts omitted\n";
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "trial,index,eigenvalue\n";
  json summaries = json::array();
  const std::int64_t n = pb.params.M * pb.params.L;
  const std::int64_t rank_deficit = std::max<std::int64_t>(0, n - pb.params.N);
  std::int64_t worst_zero_mismatch = 0;
  for (int k = 0; k < a.trials; ++k) {
    const EmpiricalSpectrum es = simulate_trial(pb.spectrum, pb.params, a.seed, static_cast<std::uint64_t>(k));
    for (std::size_t i = 0; i < es.eigenvalues.size(); ++i) csv << k << ',' << i << ',' << es.eigenvalues[i] << '\n';
    std::optional<std::int64_t> outside;
    if (s) outside = outside_support_count(es, *s, 0.05);
    summaries.push_back(summary_json(es, outside));
    worst_zero_mismatch = std::max(worst_zero_mismatch, std::abs(es.zero_count - rank_deficit));
    std::cerr << "simulate: trial " << k << " largest " << es.eigenvalues.back() << ", zeros " << es.zero_count;
    if (outside) std::cerr << ", outside S+0.05: " << *outside;
    std::cerr << '\n';
  }
  r.checks.push_back({"zero eigenvalues match the rank deficit", worst_zero_mismatch == 0,
                      static_cast<double>(worst_zero_mismatch), 0.0,
                      "expected " + std::to_string(rank_deficit) + " per trial"});
  write_file(a.out, csv.str());
  r.outputs.push_back(a.out);
  if (!a.summary.empty()) {
    write_file(a.summary, summaries.dump(2) + "\n");
    r.outputs.push_back(a.summary);
  }
  r.result = summaries;
  return r;
}

RunReport cmd_verify(const std::string& scale, std::uint64_t seed, const std::vector<int>& only) {
  RunReport r;
  r.command = "verify";
  VerifyOptions opts;
  if (scale == "desk") {
    opts.scale = Scale::Desk;
  } else if (scale == "paper") {
    opts.scale = Scale::Paper;
  } else {
    throw InputError("--scale must be desk or paper");
  }
  opts.seed = seed;
  r.inputs = {{"scale", scale}, {"seed", seed}};
  std::vector<int> ids = only;
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  r.inputs["criteria"] = ids;
  for (int id : ids) {
    const CriterionResult cr = run_criterion(id, opts);
    std::cerr << "criterion " << id << ": " << (cr.passed() ? "PASS" : "FAIL") << "  " << cr.title << "  ("
              << cr.seconds << " s)\n";
    for (auto c : cr.checks) {
      c.name = "criterion " + std::to_string(id) + ": " + c.name;
      r.checks.push_back(std::move(c));
    }
  }
  return r;
}

RunReport cmd_mp_check(const SourceArgs& src, int samples, std::uint64_t seed) {
  RunReport r;
  r.command = "mp-check";
  Problem pb = resolve(src, false);
  r.inputs = pb.echo;
  r.inputs["samples"] = samples;
  r.inputs["seed"] = seed;
  if (samples < 1) throw InputError("--samples must be at least 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-2.0, 8.0), uy(-3.0, std::log10(5.0));
  double g_res = 0.0, f_res = 0.0, mp_conj = 0.0, mp_quad = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = ux(rng);
    const cd z(x, std::pow(10.0, uy(rng)));
    const StieltjesValue sv = solve_t(pb.spectrum, pb.params, z);
    g_res = std::max(g_res, check_g_identity(pb.spectrum, pb.params, z, sv.t));
    const TildeFResiduals tf = check_tilde_f_identity(pb.params, z, sv.t, sv.tnu);
    f_res = std::max({f_res, tf.closed_form, tf.tnu});
    const MPValue mp = solve_t_mp(pb.spectrum, pb.params, z);
    const MPValue mq = solve_t_mp(pb.spectrum, pb.params, std::conj(z));
    mp_conj = std::max(mp_conj, std::abs(mq.t_mp - std::conj(mp.t_mp)));
    if (pb.spectrum.is_scalar()) {
      // for R = s I, t = s^{-1} t_1(z / s) with z t^2 + (z - c + 1) t + 1 = 0
      const double s = pb.spectrum.largest();
      const cd zs = z / s;
      const cd b = zs - pb.params.c + 1.0;
      const cd d = std::sqrt(b * b - 4.0 * zs);
      cd root = (-b + d) / (2.0 * zs);
      if (root.imag() <= 0.0) root = (-b - d) / (2.0 * zs);
      root /= s;
      mp_quad = std::max(mp_quad, std::abs(mp.t_mp - root) / std::max(1.0, std::abs(root)));
    }
  }
  r.checks.push_back({"g = -c t identity", g_res < 1e-9, g_res, 1e-9, {}});
  r.checks.push_back({"tilde f identities", f_res < 1e-10, f_res, 1e-10, {}});
  r.checks.push_back({"t_MP conjugate symmetry", mp_conj < 1e-12, mp_conj, 1e-12, {}});
  if (pb.spectrum.is_scalar()) {
    r.checks.push_back({"t_MP against the quadratic closed form", mp_quad < 1e-12, mp_quad, 1e-12, {}});
  }
  return r;
}

int finish(RunReport& r, const std::string& report_path, std::chrono::steady_clock::time_point t0) {
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.command != "verify") print_checks(r);
  const std::string text = r.to_json().dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
  } else {
    write_file(report_path, text);
  }
  std::cerr << r.command << ": " << (r.all_passed() ? "all checks passed" : "some checks FAILED") << " in "
            << r.wall_time << " s\n";
  return r.all_passed() ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic equivalent of the past/future autocovariance spectrum"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string report_path;
  app.add_option("--report", report_path, "write the JSON report here instead of stdout");

  SourceArgs support_src, density_src, sim_src, mp_src;
  std::string support_out;
  auto* support = app.add_subcommand("support", "support of nu_N: intervals and atom at zero");
  add_source(support, support_src);
  support->add_option("--out", support_out, "support JSON");

  DensityArgs dargs;
  auto* density = app.add_subcommand("density", "densities f of mu_N and g of nu_N on a grid");
  add_source(density, density_src);
  density->add_option("--out", dargs.out, "curve CSV (x,f_mu,g_nu); a .json sidecar is written next to it");
  density->add_option("--points", dargs.points, "points per support interval, or total with --xmin/--xmax");
  density->add_option("--xmin", dargs.xmin, "uniform grid start");
  density->add_option("--xmax", dargs.xmax, "uniform grid end");
  density->add_option("--eps-floor", dargs.eps_floor, "smallest imaginary part in the continuation");

  SimulateArgs sargs;
  auto* simulate = app.add_subcommand("simulate", "eigenvalues of sampled W_f W_p^* W_p W_f^*");
  add_source(simulate, sim_src);
  simulate->add_option("--trials", sargs.trials, "independent realizations");
  simulate->add_option("--seed", sargs.seed, "base seed");
  simulate->add_option("--out", sargs.out, "eigenvalue CSV (trial,index,eigenvalue)");
  simulate->add_option("--summary", sargs.summary, "per-trial summary JSON");

  std::string scale = "desk";
  std::uint64_t verify_seed = VerifyOptions{}.seed;
  std::vector<int> criteria;
  auto* verify = app.add_subcommand("verify", "acceptance suite");
  verify->add_option("--scale", scale, "desk or paper");
  verify->add_option("--seed", verify_seed, "seed for simulations and sampled points");
  verify->add_option("--criterion", criteria, "run only these criteria (1-9)");

  int samples = 50;
  std::uint64_t mp_seed = 7;
  auto* mp = app.add_subcommand("mp-check", "free-probability identities at sampled z");
  add_source(mp, mp_src);
  mp->add_option("--samples", samples, "number of sampled z");
  mp->add_option("--seed", mp_seed, "seed for the sampled z");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    RunReport r;
    if (*support) {
      r = cmd_support(support_src, support_out);
    } else if (*density) {
      r = cmd_density(density_src, dargs);
    } else if (*simulate) {
      r = cmd_simulate(sim_src, sargs);
    } else if (*verify) {
      r = cmd_verify(scale, verify_seed, criteria);
    } else {
      r = cmd_mp_check(mp_src, samples, mp_seed);
    }
    return finish(r, report_path, t0);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << " (last iterate " << e.last_iterate() << ", residual "
              << e.residual() << ")\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}
