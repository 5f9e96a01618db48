#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rmt/model.hpp"
#include "rmt/support.hpp"

namespace rmt {

using ComplexMatrix = Eigen::MatrixXcd;

/// Past and future block-Hankel matrices, each ML x N, already scaled by 1/sqrt(N).
struct HankelPair {
  ComplexMatrix past;
  ComplexMatrix future;
};

struct EmpiricalSpectrum {
  std::vector<double> eigenvalues;  // ascending, length M L, clamped >= 0
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  ModelParams params;
  std::int64_t zero_count = 0;  // #{lambda < 1e-12 lambda_max}
  /// Eigenvectors (left singular vectors of W_f W_p^*), column i matching
  /// eigenvalues[i]. Present only when requested.
  std::optional<ComplexMatrix> eigenvectors;
  /// Diagonal of I_L (x) R in the row ordering used by generate_data.
  std::vector<double> covariance_diag;
};

/// M x (N + 2L - 1) matrix of i.i.d. CN(0, R) columns, R taken diagonal with
/// the multiplicity-expanded eigenvalues of `spec`. Each (trial, column) draws
/// from its own stream derived from `seed`, so trials are reproducible and
/// independent of evaluation order.
ComplexMatrix generate_data(const Spectrum& spec, const ModelParams& params, std::uint64_t seed,
                            std::uint64_t trial = 0);

HankelPair build_hankel(const ComplexMatrix& Y, const ModelParams& params);

/// Eigenvalues of W_f W_p^* W_p W_f^* as squared singular values of W_f W_p^*.
EmpiricalSpectrum product_spectrum(const HankelPair& w, bool with_eigenvectors = false);

/// generate_data -> build_hankel -> product_spectrum, with metadata filled in.
EmpiricalSpectrum simulate_trial(const Spectrum& spec, const ModelParams& params, std::uint64_t seed,
                                 std::uint64_t trial = 0, bool with_eigenvectors = false);

/// Unweighted: (1/ML) sum 1/(lambda_i - z), estimating t_nu.
/// Weighted:   (1/ML) sum f_i^* (I_L (x) R) f_i / (lambda_i - z), estimating t.
cd empirical_stieltjes(const EmpiricalSpectrum& es, cd z, bool weighted);

/// Weights f_i^* (I_L (x) R) f_i of the weighted empirical measure.
std::vector<double> spectral_weights(const EmpiricalSpectrum& es);

/// Eigenvalues farther than `margin` from S (and from 0 when S has an atom).
std::int64_t outside_support_count(const EmpiricalSpectrum& es, const SupportSet& support, double margin);

struct Histogram {
  std::vector<double> edges;        // bins + 1 edges
  std::vector<double> probability;  // count / (M L) per bin
};

/// Histogram of the nonzero eigenvalues over [lo, hi]. bins == 0 selects the
/// Freedman-Diaconis width. Values outside [lo, hi] go to the end bins.
Histogram histogram(const EmpiricalSpectrum& es, double lo, double hi, std::size_t bins);

nlohmann::json summary_json(const EmpiricalSpectrum& es, std::optional<std::int64_t> outside_count);

}  // namespace rmt
