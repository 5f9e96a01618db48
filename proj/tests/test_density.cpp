#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "rmt/density.hpp"
#include "rmt/errors.hpp"
#include "rmt/solver.hpp"
#include "rmt/support.hpp"

using namespace rmt;

namespace {

constexpr double kPi = std::numbers::pi;

// t(z) rebuilt from the sampled density: sum over cells of mass / (x_mid - z)
// plus the atom.
cd stieltjes_from_curve(const DensityCurve& curve, cd z) {
  cd acc = curve.atom_mu / (0.0 - z);
  std::vector<double> xs;
  for (const auto& iv : curve.support.intervals) xs.push_back(iv.lo);
  for (double x : curve.grid) xs.push_back(x);
  for (const auto& iv : curve.support.intervals) xs.push_back(iv.hi);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double m = continuous_mass(curve, Measure::Mu, xs[i], xs[i + 1]);
    acc += m / (0.5 * (xs[i] + xs[i + 1]) - z);
  }
  return acc;
}

}  // namespace

TEST_SUITE("density") {

TEST_CASE("boundary value equals the scalar cubic root inside the support") {
  for (double c : {0.5, 1.0, 2.0}) {
    const SupportSet s = compute_support(Spectrum::scalar(1.0), ModelParams::from_ratio(c));
    const Interval iv = s.intervals[0];
    for (double frac : {0.01, 0.2, 0.5, 0.8, 0.99}) {
      const double x = iv.lo + frac * (iv.hi - iv.lo);
      CAPTURE(c);
      CAPTURE(x);
      const cd t = t_boundary(Spectrum::scalar(1.0), ModelParams::from_ratio(c), x);
      const cd ref = oracle::scalar_t_real(1.0, c, x);
      CHECK(std::abs(t - ref) < 1e-8 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("outside the support t(x) is real and negative for x > 0") {
  const Spectrum R = Spectrum::from_entries({{100.0, 1}, {1.0, 19}});
  const ModelParams p = ModelParams::from_ratio(0.01);
  const SupportSet s = compute_support(R, p);
  REQUIRE(s.intervals.size() == 2);
  for (double x : {0.5 * (s.intervals[0].hi + s.intervals[1].lo), s.right_edge() + 0.1, 2 * s.right_edge()}) {
    const cd t = t_boundary(R, p, x);
    CHECK(std::abs(t.imag()) < 1e-8);
    CHECK(t.real() < 0.0);
  }
  // x < 0: t is real and positive
  const cd tn = t_boundary(R, p, -1.0);
  CHECK(std::abs(tn.imag()) < 1e-8);
  CHECK(tn.real() > 0.0);
}

TEST_CASE("two routes to g agree") {
  const Spectrum R = Spectrum::cosine_profile(100);
  const ModelParams p = ModelParams::from_ratio(2.0 / 3.0);
  for (double x : {1e-4, 0.3, 1.0, 2.5, 3.9}) {
    const cd t = t_boundary(R, p, x);
    CHECK(density_nu_from_t(p, x, t) == doctest::Approx(density_nu_via_tnu(p, x, t)).epsilon(1e-9));
  }
}

TEST_CASE("hard-edge constants for a non-identity R") {
  const Spectrum R = Spectrum::from_entries({{3.0, 1}, {1.0, 1}});
  const double inv = trace_inverse(R);  // 2/3
  const double x = 1e-10;
  {
    const double c = 0.25;
    const ModelParams p = ModelParams::from_ratio(c);
    const cd t = t_boundary(R, p, x);
    const double k = kPi * std::sqrt(c * (1 - c));
    CHECK(std::sqrt(x) * density_mu_from_t(x, t) == doctest::Approx(1.0 / k).epsilon(1e-3));
    CHECK(std::sqrt(x) * density_nu_from_t(p, x, t) == doctest::Approx(inv / k).epsilon(1e-3));
  }
  {
    const ModelParams p = ModelParams::from_ratio(1.0);
    const cd t = t_boundary(R, p, x);
    const double k = std::sqrt(3.0) / (2 * kPi);
    const double scale = std::pow(x, 2.0 / 3.0);
    CHECK(scale * density_mu_from_t(x, t) == doctest::Approx(k * std::pow(inv, -1.0 / 3.0)).epsilon(2e-3));
    CHECK(scale * density_nu_from_t(p, x, t) == doctest::Approx(k * std::pow(inv, 2.0 / 3.0)).epsilon(2e-3));
  }
}

TEST_CASE("atom at zero") {
  CHECK(atom_delta(Spectrum::scalar(1.0), ModelParams::from_ratio(2.0)) == doctest::Approx(-0.5).epsilon(1e-15));
  // 1 = 2 m_R(2 delta) with R = diag(2, 1) reduces to (2 delta)^2 = 2
  CHECK(atom_delta(Spectrum::from_entries({{2.0, 1}, {1.0, 1}}), ModelParams::from_ratio(2.0)) ==
        doctest::Approx(-std::sqrt(2.0) / 2.0).epsilon(1e-14));
  CHECK(atom_delta(Spectrum::scalar(1.0), ModelParams::from_ratio(0.7)) == 0.0);
  // scalar: omega_1 = sigma2 (1 - c), delta = omega_1 / c
  CHECK(atom_delta(Spectrum::scalar(3.0), ModelParams::from_ratio(4.0)) == doctest::Approx(3.0 * (1 - 4.0) / 4.0));
}

TEST_CASE("z t(z) tends to delta as z -> 0") {
  const Spectrum R = Spectrum::from_entries({{2.0, 1}, {1.0, 1}});
  const ModelParams p = ModelParams::from_ratio(2.0);
  const cd z(0.0, 1e-7);
  const StieltjesValue sv = solve_t(R, p, z);
  CHECK(std::abs(z * sv.t - atom_delta(R, p)) < 1e-5);
}

TEST_CASE("c < 1: z t(z)^2 tends to -1 / (c (1 - c))") {
  const Spectrum R = Spectrum::from_entries({{2.0, 1}, {1.0, 1}});
  const double c = 0.5;
  const cd z(0.0, 1e-9);
  const StieltjesValue sv = solve_t(R, ModelParams::from_ratio(c), z);
  CHECK(std::abs(z * sv.t * sv.t + 1.0 / (c * (1 - c))) < 1e-3);
}

TEST_CASE("masses and first moment from the sampled curve") {
  struct Case {
    Spectrum R;
    double c;
  };
  const std::vector<Case> cases{{Spectrum::scalar(2.0), 0.3},
                                {Spectrum::from_entries({{100.0, 1}, {1.0, 19}}), 0.01},
                                {Spectrum::from_entries({{2.0, 1}, {1.0, 1}}), 2.0},
                                {Spectrum::cosine_profile(50), 1.0}};
  for (const auto& k : cases) {
    CAPTURE(k.c);
    const ModelParams p = ModelParams::from_ratio(k.c);
    const SupportSet s = compute_support(k.R, p);
    const DensityCurve curve = build_curve(k.R, p, s, 300);
    const MeasureIntegrals I = integrate_curve(curve);
    const MomentSummary m = moments(k.R, p);
    CHECK(std::abs(I.mass_nu + curve.atom_nu - 1.0) < 1e-3);
    CHECK(std::abs(I.mass_mu + curve.atom_mu - m.trR) < 1e-3);
    CHECK(std::abs(I.first_moment_mu - m.first_moment_mu) < 1e-3);
  }
}

TEST_CASE("Stieltjes inversion round trip") {
  for (double c : {0.5, 2.0}) {
    const Spectrum R = Spectrum::from_entries({{2.0, 1}, {1.0, 1}});
    const ModelParams p = ModelParams::from_ratio(c);
    const DensityCurve curve = build_curve(R, p, compute_support(R, p), 800);
    for (cd z : {cd(1.0, 1.0), cd(2.0, 0.5)}) {
      CAPTURE(c);
      CAPTURE(z);
      CHECK(std::abs(stieltjes_from_curve(curve, z) - solve_t(R, p, z).t) < 1e-3);
    }
  }
}

TEST_CASE("curve grid and csv") {
  const Spectrum R = Spectrum::scalar(1.0);
  const ModelParams p = ModelParams::from_ratio(2.0);
  const SupportSet s = compute_support(R, p);
  const DensityCurve curve = build_curve(R, p, s, 50);
  CHECK(std::is_sorted(curve.grid.begin(), curve.grid.end()));
  for (double x : curve.grid) {
    CHECK(x > 0.0);
    CHECK(x != s.intervals[0].lo);
    CHECK(x != s.intervals[0].hi);
  }
  CHECK(curve.grid.back() > s.right_edge());
  CHECK(curve.atom_nu == doctest::Approx(0.5));
  CHECK(curve.atom_mu == doctest::Approx(0.5));
  std::ostringstream os;
  write_curve_csv(curve, os);
  CHECK(os.str().rfind("x,f_mu,g_nu\n", 0) == 0);
  CHECK(curve_sidecar(curve)["points"] == curve.grid.size());
  CHECK_THROWS_AS(build_curve(R, p, s, 4), InputError);
}

TEST_CASE("clamping of rounding-level negatives") {
  const ModelParams p = ModelParams::from_ratio(0.5);
  CHECK(density_mu_from_t(1.0, cd(-1.0, -1e-12)) == 0.0);
  CHECK_THROWS_AS(density_mu_from_t(1.0, cd(-1.0, -1e-3)), NumericError);
  CHECK(density_nu_from_t(p, 1.0, cd(-1.0, -1e-14)) == 0.0);
  CHECK_THROWS_AS(t_boundary(Spectrum::scalar(1.0), p, 0.0), InputError);
  CHECK_THROWS_AS(density_mu(Spectrum::scalar(1.0), p, -1.0), InputError);
}

TEST_CASE("custom grid evaluation") {
  const Spectrum R = Spectrum::scalar(1.0);
  const ModelParams p = ModelParams::from_ratio(0.5);
  const SupportSet s = compute_support(R, p);
  const DensityCurve curve = evaluate_curve(R, p, s, {-1.0, 1.0, 5.0});
  CHECK(curve.f[0] < 1e-12);
  CHECK(curve.f[1] == doctest::Approx(oracle::scalar_t_real(1.0, 0.5, 1.0).imag() / kPi).epsilon(1e-8));
  CHECK(curve.g[2] < 1e-12);
  CHECK_THROWS_AS(evaluate_curve(R, p, s, {0.0}), InputError);
}

}
