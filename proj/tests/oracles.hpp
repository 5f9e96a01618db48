#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// the library's solvers.

#include <Eigen/Eigenvalues>
#include <complex>
#include <optional>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

// Roots of sum_k coef[k] t^k (coef.back() != 0) from the companion matrix.
inline std::vector<cd> poly_roots(const std::vector<cd>& coef) {
  const int n = static_cast<int>(coef.size()) - 1;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -coef[static_cast<std::size_t>(i)] / coef.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C);
  std::vector<cd> out;
  for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// One Newton step on a polynomial to clean up companion-matrix rounding.
inline cd newton_polish(const std::vector<cd>& coef, cd t) {
  for (int it = 0; it < 3; ++it) {
    cd p = 0.0, dp = 0.0;
    for (std::size_t k = coef.size(); k-- > 0;) {
      dp = dp * t + p;
      p = p * t + coef[k];
    }
    if (dp == 0.0) break;
    t -= p / dp;
  }
  return t;
}

// For R = s I the canonical equation clears to the cubic
//   -z^2 c^2 t^3 + z c s (1 - c) t^2 + z t + s = 0.
inline std::vector<cd> scalar_cubic(double s, double c, cd z) {
  return {s, z, z * c * s * (1.0 - c), -z * z * c * c};
}

// The root with Im t > 0 and Im(z t) > 0 (Im z > 0).
inline std::optional<cd> scalar_t(double s, double c, cd z) {
  const auto coef = scalar_cubic(s, c, z);
  std::optional<cd> pick;
  int hits = 0;
  for (cd r : poly_roots(coef)) {
    r = newton_polish(coef, r);
    if (r.imag() > 0.0 && (z * r).imag() > 0.0) {
      pick = r;
      ++hits;
    }
  }
  if (hits != 1) return std::nullopt;
  return pick;
}

// On the real axis inside the support: the root with the largest Im t.
inline cd scalar_t_real(double s, double c, double x) {
  const auto coef = scalar_cubic(s, c, cd(x, 0.0));
  cd best = 0.0;
  for (cd r : poly_roots(coef)) {
    r = newton_polish(coef, r);
    if (r.imag() > best.imag()) best = r;
  }
  return best;
}

// Direct loop: (1/M) sum m lambda / (lambda - w)
inline cd m_R(const std::vector<double>& lam, const std::vector<double>& mult, cd w) {
  cd acc = 0.0;
  double M = 0.0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    acc += mult[i] * lam[i] / (lam[i] - w);
    M += mult[i];
  }
  return acc / M;
}

}  // namespace oracle
