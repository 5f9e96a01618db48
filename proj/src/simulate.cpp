#include "rmt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rmt/errors.hpp"
#include "rmt/kernels.hpp"

namespace rmt {

namespace {

constexpr double kZeroThreshold = 1e-12;

std::mt19937_64 column_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t column) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(column), static_cast<std::uint32_t>(column >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

ComplexMatrix generate_data(const Spectrum& spec, const ModelParams& params, std::uint64_t seed,
                            std::uint64_t trial) {
  if (!params.has_dims()) throw InputError("simulation needs explicit M, N, L");
  if (params.M != spec.dimension()) {
    throw InputError("spectrum dimension " + std::to_string(spec.dimension()) + " does not match M = " +
                     std::to_string(params.M));
  }
  const auto lambdas = spec.expanded();
  const Eigen::Index rows = params.M;
  const Eigen::Index cols = params.N + 2 * params.L - 1;
  ComplexMatrix Y(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    auto rng = column_stream(seed, trial, static_cast<std::uint64_t>(j));
    // real and imaginary parts i.i.d. N(0, 1/2)
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    for (Eigen::Index m = 0; m < rows; ++m) {
      const double re = normal(rng);
      const double im = normal(rng);
      Y(m, j) = std::sqrt(lambdas[static_cast<std::size_t>(m)]) * cd(re, im);
    }
  }
  return Y;
}

HankelPair build_hankel(const ComplexMatrix& Y, const ModelParams& params) {
  if (!params.has_dims()) throw InputError("build_hankel needs explicit M, N, L");
  const Eigen::Index M = params.M, N = params.N, L = params.L;
  if (Y.rows() != M || Y.cols() < N + 2 * L - 1) {
    throw InputError("build_hankel: data matrix must be M x (N + 2L - 1) or wider");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  HankelPair w{ComplexMatrix(M * L, N), ComplexMatrix(M * L, N)};
  for (Eigen::Index i = 0; i < L; ++i) {
    w.past.block(i * M, 0, M, N) = scale * Y.middleCols(i, N);
    w.future.block(i * M, 0, M, N) = scale * Y.middleCols(L + i, N);
  }
  return w;
}

EmpiricalSpectrum product_spectrum(const HankelPair& w, bool with_eigenvectors) {
  if (w.past.rows() != w.future.rows() || w.past.cols() != w.future.cols()) {
    throw InputError("product_spectrum: W_p and W_f shapes differ");
  }
  const ComplexMatrix A = w.future * w.past.adjoint();
  Eigen::BDCSVD<ComplexMatrix> svd;
  svd.compute(A, with_eigenvectors ? Eigen::ComputeThinU : 0);
  if (svd.info() != Eigen::Success) throw NumericError("product_spectrum: SVD did not converge");

  const auto& s = svd.singularValues();  // descending
  const Eigen::Index n = s.size();
  EmpiricalSpectrum es;
  es.eigenvalues.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) es.eigenvalues[static_cast<std::size_t>(i)] = s(n - 1 - i) * s(n - 1 - i);
  const double top = es.eigenvalues.empty() ? 0.0 : es.eigenvalues.back();
  es.zero_count = std::count_if(es.eigenvalues.begin(), es.eigenvalues.end(),
                                [&](double v) { return v < kZeroThreshold * top; });
  if (with_eigenvectors) es.eigenvectors = svd.matrixU().rowwise().reverse();
  return es;
}

EmpiricalSpectrum simulate_trial(const Spectrum& spec, const ModelParams& params, std::uint64_t seed,
                                 std::uint64_t trial, bool with_eigenvectors) {
  const ComplexMatrix Y = generate_data(spec, params, seed, trial);
  EmpiricalSpectrum es = product_spectrum(build_hankel(Y, params), with_eigenvectors);
  es.seed = seed;
  es.trial = trial;
  es.params = params;
  const auto lambdas = spec.expanded();
  es.covariance_diag.reserve(static_cast<std::size_t>(params.M * params.L));
  for (std::int64_t i = 0; i < params.L; ++i) es.covariance_diag.insert(es.covariance_diag.end(), lambdas.begin(), lambdas.end());
  return es;
}

std::vector<double> spectral_weights(const EmpiricalSpectrum& es) {
  if (!es.eigenvectors) throw InputError("weighted measure requires eigenvectors");
  const auto& U = *es.eigenvectors;
  if (static_cast<std::size_t>(U.rows()) != es.covariance_diag.size()) {
    throw InputError("weighted measure requires the covariance diagonal");
  }
  const Eigen::Map<const Eigen::VectorXd> r(es.covariance_diag.data(), U.rows());
  std::vector<double> out(static_cast<std::size_t>(U.cols()));
  for (Eigen::Index i = 0; i < U.cols(); ++i) out[static_cast<std::size_t>(i)] = U.col(i).cwiseAbs2().dot(r);
  return out;
}

cd empirical_stieltjes(const EmpiricalSpectrum& es, cd z, bool weighted) {
  const std::vector<double> weights =
      weighted ? spectral_weights(es) : std::vector<double>(es.eigenvalues.size(), 1.0);
  const auto s = kernels::pole_sums(es.eigenvalues, weights, -z, 1.0);
  return s.r0 / static_cast<double>(es.eigenvalues.size());
}

std::int64_t outside_support_count(const EmpiricalSpectrum& es, const SupportSet& support, double margin) {
  if (!(margin > 0.0)) throw InputError("margin must be positive");
  return std::count_if(es.eigenvalues.begin(), es.eigenvalues.end(),
                       [&](double v) { return support.distance(v) > margin; });
}

Histogram histogram(const EmpiricalSpectrum& es, double lo, double hi, std::size_t bins) {
  if (!(hi > lo)) throw InputError("histogram range must be non-empty");
  const auto first = es.eigenvalues.begin() + es.zero_count;
  std::vector<double> values(first, es.eigenvalues.end());
  if (bins == 0) {
    // Freedman-Diaconis
    std::size_t nb = 1;
    if (values.size() >= 4) {
      const double q1 = values[values.size() / 4];
      const double q3 = values[(3 * values.size()) / 4];
      const double width = 2.0 * (q3 - q1) / std::cbrt(static_cast<double>(values.size()));
      if (width > 0.0) nb = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    }
    bins = std::clamp<std::size_t>(nb, 1, 10000);
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  h.probability.assign(bins, 0.0);
  const double unit = 1.0 / static_cast<double>(es.eigenvalues.size());
  for (double v : values) {
    const double pos = (v - lo) / (hi - lo) * static_cast<double>(bins);
    const auto k = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
    h.probability[k] += unit;
  }
  return h;
}

nlohmann::json summary_json(const EmpiricalSpectrum& es, std::optional<std::int64_t> outside_count) {
  const double mean_trace = es.eigenvalues.empty()
                                ? 0.0
                                : std::accumulate(es.eigenvalues.begin(), es.eigenvalues.end(), 0.0) /
                                      static_cast<double>(es.eigenvalues.size());
  nlohmann::json j{{"seed", es.seed},
                   {"trial", es.trial},
                   {"dims", {{"M", es.params.M}, {"N", es.params.N}, {"L", es.params.L}, {"c", es.params.c}}},
                   {"zero_count", es.zero_count},
                   {"mean_trace", mean_trace}};
  j["outside_count"] = outside_count ? nlohmann::json(*outside_count) : nlohmann::json(nullptr);
  return j;
}

}  // namespace rmt
