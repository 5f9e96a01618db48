#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmt/errors.hpp"
#include "rmt/simulate.hpp"
#include "rmt/solver.hpp"
#include "rmt/support.hpp"

using namespace rmt;

TEST_SUITE("simulate") {

TEST_CASE("data is reproducible per (seed, trial)") {
  const Spectrum R = Spectrum::scalar(1.0, 6);
  const ModelParams p = ModelParams::from_dims(6, 20, 2);
  const ComplexMatrix a = generate_data(R, p, 42, 0);
  CHECK(a.rows() == 6);
  CHECK(a.cols() == 20 + 2 * 2 - 1);
  CHECK(a == generate_data(R, p, 42, 0));
  CHECK(a != generate_data(R, p, 42, 1));
  CHECK(a != generate_data(R, p, 43, 0));
}

TEST_CASE("row variances follow the covariance spectrum") {
  const Spectrum R = Spectrum::from_entries({{4.0, 1}, {1.0, 1}});
  const ModelParams p = ModelParams::from_dims(2, 40000, 1);
  const ComplexMatrix Y = generate_data(R, p, 3);
  const double n = static_cast<double>(Y.cols());
  CHECK(Y.row(0).squaredNorm() / n == doctest::Approx(4.0).epsilon(0.03));
  CHECK(Y.row(1).squaredNorm() / n == doctest::Approx(1.0).epsilon(0.03));
  // real and imaginary parts share the variance
  CHECK(Y.row(1).real().squaredNorm() / n == doctest::Approx(0.5).epsilon(0.03));
  CHECK(std::abs(Y.row(0).dot(Y.row(1))) / n < 0.05);
}

TEST_CASE("block-Hankel layout") {
  const ModelParams p = ModelParams::from_dims(3, 5, 2);
  const ComplexMatrix Y = generate_data(Spectrum::scalar(1.0, 3), p, 1);
  const HankelPair w = build_hankel(Y, p);
  const double s = 1.0 / std::sqrt(5.0);
  for (Eigen::Index l = 0; l < 2; ++l) {
    for (Eigen::Index m = 0; m < 3; ++m) {
      for (Eigen::Index n = 0; n < 5; ++n) {
        CHECK(w.past(l * 3 + m, n) == s * Y(m, n + l));
        CHECK(w.future(l * 3 + m, n) == s * Y(m, n + l + 2));
      }
    }
  }
  CHECK_THROWS_AS(build_hankel(Y.leftCols(5), p), InputError);
}

TEST_CASE("eigenvalues equal those of the Hermitian product") {
  const Spectrum R = Spectrum::from_entries({{2.0, 3}, {0.5, 2}});
  const ModelParams p = ModelParams::from_dims(5, 30, 3);
  const HankelPair w = build_hankel(generate_data(R, p, 8), p);
  const EmpiricalSpectrum es = product_spectrum(w);
  const ComplexMatrix A = w.future * w.past.adjoint();
  const ComplexMatrix H = A * A.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(H);
  REQUIRE(es.eigenvalues.size() == 15);
  const double top = eig.eigenvalues().maxCoeff();
  for (std::size_t i = 0; i < 15; ++i) {
    CHECK(std::abs(es.eigenvalues[i] - eig.eigenvalues()(static_cast<Eigen::Index>(i))) < 1e-12 * top);
  }
  CHECK(std::is_sorted(es.eigenvalues.begin(), es.eigenvalues.end()));
}

TEST_CASE("rank deficit gives exact zeros") {
  const ModelParams p = ModelParams::from_dims(20, 25, 2);
  const EmpiricalSpectrum es = simulate_trial(Spectrum::scalar(1.0, 20), p, 5);
  CHECK(es.zero_count == 40 - 25);
  const ModelParams q = ModelParams::from_dims(20, 60, 2);
  CHECK(simulate_trial(Spectrum::scalar(1.0, 20), q, 5).zero_count == 0);
}

TEST_CASE("eigenvectors and spectral weights") {
  const Spectrum R = Spectrum::from_entries({{3.0, 4}, {1.0, 4}});
  const ModelParams p = ModelParams::from_dims(8, 40, 2);
  const EmpiricalSpectrum es = simulate_trial(R, p, 9, 0, true);
  REQUIRE(es.eigenvectors.has_value());
  const ComplexMatrix& U = *es.eigenvectors;
  CHECK((U.adjoint() * U - ComplexMatrix::Identity(16, 16)).norm() < 1e-10);
  const auto w = spectral_weights(es);
  // weights sum to Tr(I_L (x) R)
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(2.0 * (3.0 * 4 + 1.0 * 4)));
  CHECK_THROWS_AS(spectral_weights(simulate_trial(R, p, 9)), InputError);
}

TEST_CASE("R = I: weighted and unweighted transforms coincide") {
  const ModelParams p = ModelParams::from_dims(10, 50, 2);
  const EmpiricalSpectrum es = simulate_trial(Spectrum::scalar(1.0, 10), p, 2, 0, true);
  const cd z(1.0, 0.5);
  CHECK(std::abs(empirical_stieltjes(es, z, true) - empirical_stieltjes(es, z, false)) < 1e-12);
  cd direct = 0.0;
  for (double v : es.eigenvalues) direct += 1.0 / (v - z);
  CHECK(std::abs(empirical_stieltjes(es, z, false) - direct / 20.0) < 1e-14);
}

TEST_CASE("moderate size: empirical transform near the deterministic equivalent") {
  const Spectrum R = Spectrum::cosine_profile(100);
  const ModelParams p = ModelParams::from_dims(100, 400, 2);
  const EmpiricalSpectrum es = simulate_trial(R, p, 77, 0, true);
  for (cd z : {cd(1.0, 1.0), cd(3.0, 2.0)}) {
    const StieltjesValue sv = solve_t(R, p, z);
    CHECK(std::abs(empirical_stieltjes(es, z, false) - sv.tnu) < 10.0 / p.N);
    CHECK(std::abs(empirical_stieltjes(es, z, true) - sv.t) < 10.0 / p.N);
  }
}

TEST_CASE("histogram and outside count") {
  const ModelParams p = ModelParams::from_dims(50, 40, 2);
  const EmpiricalSpectrum es = simulate_trial(Spectrum::scalar(1.0, 50), p, 4);
  const SupportSet s = compute_support(Spectrum::scalar(1.0), p);
  const Histogram h = histogram(es, s.intervals[0].lo, s.right_edge(), 20);
  CHECK(h.edges.size() == 21);
  const double total = std::accumulate(h.probability.begin(), h.probability.end(), 0.0);
  CHECK(total == doctest::Approx(1.0 - static_cast<double>(es.zero_count) / 100.0));
  CHECK(histogram(es, 0.0, 10.0, 0).probability.size() >= 1);
  // zeros belong to S through the atom
  CHECK(outside_support_count(es, s, 0.5) <= 2);
  CHECK_THROWS_AS(outside_support_count(es, s, 0.0), InputError);
  CHECK_THROWS_AS(histogram(es, 1.0, 1.0, 5), InputError);
}

TEST_CASE("summary json") {
  const ModelParams p = ModelParams::from_dims(4, 10, 1);
  const EmpiricalSpectrum es = simulate_trial(Spectrum::scalar(1.0, 4), p, 11, 2);
  const auto j = summary_json(es, 0);
  CHECK(j["seed"] == 11);
  CHECK(j["trial"] == 2);
  CHECK(j["dims"]["M"] == 4);
  CHECK(j["outside_count"] == 0);
  CHECK(summary_json(es, std::nullopt)["outside_count"].is_null());
}

TEST_CASE("dimension mismatch is an input error") {
  CHECK_THROWS_AS(generate_data(Spectrum::scalar(1.0, 3), ModelParams::from_dims(4, 10, 1), 1), InputError);
  CHECK_THROWS_AS(generate_data(Spectrum::scalar(1.0, 3), ModelParams::from_ratio(0.5), 1), InputError);
}

}
