#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rmt/density.hpp"
#include "rmt/errors.hpp"
#include "rmt/support.hpp"

using namespace rmt;

namespace {

// phi(w) = c w^2 m (c m - 1) from the direct trace loop
double phi_direct(const std::vector<double>& lam, const std::vector<double>& mult, double c, double w) {
  const double m = oracle::m_R(lam, mult, w).real();
  return c * w * w * m * (c * m - 1.0);
}

// Local extrema of phi on a fine grid away from the poles: brute force
// reference for the edges.
std::vector<double> brute_extrema(const std::vector<double>& lam, const std::vector<double>& mult, double c,
                                  double lo, double hi, int n) {
  std::vector<double> out;
  const double h = (hi - lo) / n;
  auto near_pole = [&](double w) {
    for (double l : lam) {
      if (std::abs(w - l) < 3 * h) return true;
    }
    return std::abs(w) < 3 * h;
  };
  for (int i = 1; i < n; ++i) {
    const double a = lo + (i - 1) * h, b = lo + i * h, d = lo + (i + 1) * h;
    if (near_pole(a) || near_pole(b) || near_pole(d)) continue;
    const double fa = phi_direct(lam, mult, c, a), fb = phi_direct(lam, mult, c, b),
                 fd = phi_direct(lam, mult, c, d);
    if ((fb > fa && fb > fd) || (fb < fa && fb < fd)) out.push_back(fb);
  }
  return out;
}

bool has_close(const std::vector<double>& xs, double x, double tol) {
  return std::any_of(xs.begin(), xs.end(), [&](double v) { return std::abs(v - x) <= tol; });
}

}  // namespace

TEST_SUITE("support") {

TEST_CASE("scalar closed forms") {
  const ScalarEdges e1 = scalar_edges(1.0, 1.0);
  CHECK(e1.w_plus == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(e1.x_plus == doctest::Approx(6.75).epsilon(1e-15));
  const ScalarEdges e23 = scalar_edges(1.0, 2.0 / 3.0);
  CHECK(e23.w_plus == doctest::Approx(2.758305739).epsilon(1e-9));
  CHECK(e23.x_plus == doctest::Approx(3.978425).epsilon(1e-6));
}

TEST_CASE("scalar support: numeric edges, atom and left edge for c > 1") {
  for (double s2 : {0.5, 1.0, 2.0}) {
    for (double c : {0.1, 0.5, 1.0, 2.0, 4.0}) {
      CAPTURE(s2);
      CAPTURE(c);
      const SupportSet s = compute_support(Spectrum::scalar(s2), ModelParams::from_ratio(c));
      REQUIRE(s.intervals.size() == 1);
      CHECK(s.right_edge() == doctest::Approx(scalar_edges(s2, c).x_plus).epsilon(1e-12));
      if (c > 1.0) {
        REQUIRE(s.atom_at_zero.has_value());
        CHECK(*s.atom_at_zero == doctest::Approx(1.0 - 1.0 / c));
        // the other root of the same quadratic gives the left edge
        const double sm = 0.5 * (1.0 - std::sqrt(1.0 + 8.0 * c));
        const double g = 1.0 + 1.0 / sm;
        CHECK(s.intervals[0].lo == doctest::Approx(s2 * s2 * c * g * g * (c + sm)).epsilon(1e-10));
      } else {
        CHECK_FALSE(s.atom_at_zero.has_value());
        CHECK(s.intervals[0].lo == 0.0);
      }
    }
  }
}

TEST_CASE("phi' matches finite differences") {
  const Spectrum R = Spectrum::from_entries({{3.0, 1}, {1.5, 2}, {0.5, 1}});
  const ModelParams p = ModelParams::from_ratio(0.8);
  for (double w : {-1.0, 0.2, 0.9, 2.0, 2.7, 5.0}) {
    const double h = 1e-6;
    const double fd = (phi(R, p, w + h).real() - phi(R, p, w - h).real()) / (2 * h);
    CHECK(phi_prime(R, p, w) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("omega and mu roots interlace with the eigenvalues") {
  const Spectrum R = Spectrum::from_entries({{3.0, 1}, {1.0, 1}});
  const PhiLandscape land = find_roots(R, ModelParams::from_ratio(0.5));
  // mu root of 3/(3-w) + 1/(1-w) = 0 is w = 3/2
  REQUIRE(land.mu_roots.size() == 1);
  CHECK(land.mu_roots[0] == doctest::Approx(1.5).epsilon(1e-14));
  // omega roots of m_R(w) = 2
  REQUIRE(land.omega_roots.size() == 2);
  for (double w : land.omega_roots) {
    CHECK(std::abs(trace_resolvent(R, w).real() - 2.0) < 1e-12);
  }
  CHECK(land.omega_roots[0] < 1.0);
  CHECK(land.omega_roots[1] > 1.0);
  CHECK(land.omega_roots[1] < 3.0);
}

TEST_CASE("split support matches brute-force extrema of phi") {
  // As c -> 0 a two-atom spectrum only splits when the smaller eigenvalue
  // carries more than 8/9 of the weight; 19 : 1 does.
  const std::vector<double> lam{100.0, 1.0}, mult{1.0, 19.0};
  const Spectrum R = Spectrum::from_entries({{100.0, 1}, {1.0, 19}});
  for (double c : {0.001, 0.01}) {
    CAPTURE(c);
    const ModelParams p = ModelParams::from_ratio(c);
    const SupportSet s = compute_support(R, p);
    REQUIRE(s.intervals.size() == 2);
    CHECK(s.intervals[0].lo == 0.0);
    const auto ref = brute_extrema(lam, mult, c, 1.0, 300.0, 600000);
    CHECK(has_close(ref, s.intervals[0].hi, 1e-4 * s.intervals[0].hi));
    CHECK(has_close(ref, s.intervals[1].lo, 1e-4 * s.intervals[1].lo));
    CHECK(has_close(ref, s.intervals[1].hi, 1e-4 * s.intervals[1].hi));
    // density vanishes in the gap and not inside
    const double gap = 0.5 * (s.intervals[0].hi + s.intervals[1].lo);
    CHECK(density_nu(R, p, gap) < 1e-10);
    const double inside = 0.5 * (s.intervals[1].lo + s.intervals[1].hi);
    CHECK(density_nu(R, p, inside) > 1e-3);
  }
  CHECK(compute_support(R, ModelParams::from_ratio(1.0)).intervals.size() == 2);
  CHECK(compute_support(R, ModelParams::from_ratio(2.0)).intervals.size() == 1);
  // equal weights never split, however far apart
  CHECK(compute_support(Spectrum::from_entries({{100.0, 1}, {1.0, 1}}), ModelParams::from_ratio(1e-4))
            .intervals.size() == 1);
}

TEST_CASE("edges are critical values: phi'(w) = 0 at each edge") {
  const Spectrum R = Spectrum::from_entries({{100.0, 1}, {10.0, 1}, {1.0, 38}});
  const ModelParams p = ModelParams::from_ratio(0.005);
  const SupportSet s = compute_support(R, p);
  CHECK(s.intervals.size() >= 2);
  for (const auto& cp : s.critical_points) {
    CHECK(std::abs(phi_prime(R, p, cp.w)) < 1e-6 * std::max(1.0, std::abs(cp.x / cp.w)));
    CHECK(phi(R, p, cp.w).real() == doctest::Approx(cp.x).epsilon(1e-12));
  }
  for (std::size_t i = 0; i + 1 < s.intervals.size(); ++i) CHECK(s.intervals[i].hi < s.intervals[i + 1].lo);
}

TEST_CASE("flagship spectrum has a single interval from 0") {
  const SupportSet s = compute_support(Spectrum::cosine_profile(500), ModelParams::from_dims(500, 1500, 2));
  REQUIRE(s.intervals.size() == 1);
  CHECK(s.intervals[0].lo == 0.0);
  CHECK_FALSE(s.atom_at_zero.has_value());
  CHECK(s.right_edge() > 4.0);
  CHECK(s.right_edge() < 4.5);
}

TEST_CASE("single-interval condition") {
  CHECK(single_interval_condition(Spectrum::cosine_profile(200), 2.0));
  CHECK_FALSE(single_interval_condition(Spectrum::from_entries({{10.0, 100}, {1.0, 100}}), 1.0));
  CHECK(single_interval_condition(Spectrum::scalar(1.0, 10), 0.1));
  CHECK_THROWS_AS(single_interval_condition(Spectrum::scalar(1.0), 0.0), InputError);
}

TEST_CASE("distance to the support") {
  const SupportSet s = compute_support(Spectrum::scalar(1.0), ModelParams::from_ratio(2.0));
  CHECK(s.contains(0.0));
  CHECK(s.distance(0.05) == doctest::Approx(std::min(0.05, s.intervals[0].lo - 0.05)));
  CHECK(s.distance(s.right_edge() + 1.0) == doctest::Approx(1.0));
  CHECK(s.contains(1.0));
}

TEST_CASE("json round trip") {
  const SupportSet s = compute_support(Spectrum::from_entries({{100.0, 1}, {1.0, 19}}), ModelParams::from_ratio(0.01));
  const auto j = to_json(s);
  const SupportSet back = support_from_json(j);
  REQUIRE(back.intervals.size() == s.intervals.size());
  for (std::size_t i = 0; i < s.intervals.size(); ++i) {
    CHECK(back.intervals[i].lo == s.intervals[i].lo);
    CHECK(back.intervals[i].hi == s.intervals[i].hi);
  }
  CHECK(back.critical_points.size() == s.critical_points.size());
  CHECK(j["atom"].is_null());
  CHECK(to_json(compute_support(Spectrum::scalar(1.0), ModelParams::from_ratio(2.0)))["atom"] == 0.5);
}

}
