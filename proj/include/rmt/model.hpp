#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rmt {

using cd = std::complex<double>;

struct SpectrumEntry {
  double lambda;
  std::int64_t multiplicity;
};

/// Eigenvalues of the covariance R, stored as distinct values with
/// multiplicities, sorted strictly decreasing.
///
/// All trace functionals are O(number of distinct eigenvalues). Values within
/// 1e-12 relative of each other are merged on construction.
class Spectrum {
 public:
  /// Validates, merges and sorts. Throws InputError on non-positive lambda,
  /// zero multiplicity or an empty list. Bounds default to min/max eigenvalue.
  static Spectrum from_entries(std::vector<SpectrumEntry> entries,
                               std::optional<double> lower = std::nullopt,
                               std::optional<double> upper = std::nullopt);

  /// R = sigma2 * I_M.
  static Spectrum scalar(double sigma2, std::int64_t M = 1);

  /// lambda_k = 1/2 + (pi/4) cos(pi (k-1) / (2M)), k = 1..M.
  static Spectrum cosine_profile(std::int64_t M);

  std::span<const SpectrumEntry> entries() const noexcept { return entries_; }
  /// Distinct eigenvalues, decreasing.
  std::span<const double> lambdas() const noexcept { return lambdas_; }
  /// Multiplicities as doubles, aligned with lambdas().
  std::span<const double> weights() const noexcept { return weights_; }

  std::int64_t dimension() const noexcept { return dimension_; }
  std::size_t distinct() const noexcept { return lambdas_.size(); }
  double largest() const noexcept { return lambdas_.front(); }
  double smallest() const noexcept { return lambdas_.back(); }
  double lower_bound() const noexcept { return lower_; }
  double upper_bound() const noexcept { return upper_; }
  bool is_scalar() const noexcept { return lambdas_.size() == 1; }

  /// Multiplicity-expanded eigenvalue list, decreasing, length M.
  std::vector<double> expanded() const;

 private:
  std::vector<SpectrumEntry> entries_;
  std::vector<double> lambdas_;
  std::vector<double> weights_;
  std::int64_t dimension_ = 0;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

/// Dimensions (M, N, L) and the ratio c = M L / N.
///
/// The deterministic equivalent depends on the dimensions only through c, so
/// params built from a bare ratio carry zero dimensions.
struct ModelParams {
  std::int64_t M = 0;
  std::int64_t N = 0;
  std::int64_t L = 0;
  double c = 0.0;

  static ModelParams from_dims(std::int64_t M, std::int64_t N, std::int64_t L);
  static ModelParams from_ratio(double c);

  bool has_dims() const noexcept { return M > 0 && N > 0 && L > 0; }
};

struct MomentSummary {
  double trR;    // (1/M) Tr R
  double trR2;   // (1/M) Tr R^2
  double first_moment_mu;  // c * trR * trR2
};

/// m_R(w) = (1/M) Tr R (R - w I)^{-1}. Throws NumericError at a pole.
cd trace_resolvent(const Spectrum& spec, cd w);

/// d/dw m_R(w) = (1/M) Tr R (R - w I)^{-2}. Throws NumericError at a pole.
cd trace_resolvent_derivative(const Spectrum& spec, cd w);

/// (1/M) Tr R^{-1}.
double trace_inverse(const Spectrum& spec);

MomentSummary moments(const Spectrum& spec, const ModelParams& params);

/// Parses CSV ("lambda,multiplicity" rows, optional header) or JSON
/// {"eigenvalues":[{"lambda":x,"multiplicity":k},...]}.
Spectrum load_spectrum(std::string_view content);

/// Reads the file and forwards to load_spectrum.
Spectrum load_spectrum_file(const std::string& path);

}  // namespace rmt
