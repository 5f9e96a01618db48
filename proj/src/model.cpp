#include "rmt/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rmt/errors.hpp"
#include "rmt/kernels.hpp"

namespace rmt {

namespace {

constexpr double kMergeRelTol = 1e-12;

}  // namespace

Spectrum Spectrum::from_entries(std::vector<SpectrumEntry> entries, std::optional<double> lower,
                                std::optional<double> upper) {
  if (entries.empty()) throw InputError("spectrum is empty");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!std::isfinite(e.lambda) || e.lambda <= 0.0) {
      throw InputError("entry " + std::to_string(i + 1) +
                       ", field lambda: eigenvalue must be positive and finite");
    }
    if (e.multiplicity < 1) {
      throw InputError("entry " + std::to_string(i + 1) +
                       ", field multiplicity: must be a positive integer");
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const SpectrumEntry& x, const SpectrumEntry& y) { return x.lambda > y.lambda; });

  Spectrum s;
  for (const auto& e : entries) {
    if (!s.entries_.empty()) {
      auto& prev = s.entries_.back();
      if (prev.lambda - e.lambda <= kMergeRelTol * prev.lambda) {
        // keep the multiplicity-weighted mean so merging is order independent
        const double total = static_cast<double>(prev.multiplicity + e.multiplicity);
        prev.lambda = (prev.lambda * static_cast<double>(prev.multiplicity) +
                       e.lambda * static_cast<double>(e.multiplicity)) /
                      total;
        prev.multiplicity += e.multiplicity;
        continue;
      }
    }
    s.entries_.push_back(e);
  }
  for (const auto& e : s.entries_) {
    s.lambdas_.push_back(e.lambda);
    s.weights_.push_back(static_cast<double>(e.multiplicity));
    s.dimension_ += e.multiplicity;
  }
  s.lower_ = lower.value_or(s.lambdas_.back());
  s.upper_ = upper.value_or(s.lambdas_.front());
  if (!(s.lower_ > 0.0) || s.lower_ > s.lambdas_.back() || s.upper_ < s.lambdas_.front()) {
    throw InputError("spectrum bounds must satisfy 0 < a <= lambda <= b");
  }
  return s;
}

Spectrum Spectrum::scalar(double sigma2, std::int64_t M) {
  return from_entries({{sigma2, M}});
}

Spectrum Spectrum::cosine_profile(std::int64_t M) {
  if (M < 1) throw InputError("cosine profile needs M >= 1");
  std::vector<SpectrumEntry> e;
  e.reserve(static_cast<std::size_t>(M));
  for (std::int64_t k = 1; k <= M; ++k) {
    const double angle = std::numbers::pi * static_cast<double>(k - 1) / (2.0 * static_cast<double>(M));
    e.push_back({0.5 + std::numbers::pi / 4.0 * std::cos(angle), 1});
  }
  return from_entries(std::move(e));
}

std::vector<double> Spectrum::expanded() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(dimension_));
  for (const auto& e : entries_) out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), e.lambda);
  return out;
}

ModelParams ModelParams::from_dims(std::int64_t M, std::int64_t N, std::int64_t L) {
  if (M < 1 || N < 1 || L < 1) throw InputError("dimensions M, N, L must all be >= 1");
  ModelParams p;
  p.M = M;
  p.N = N;
  p.L = L;
  p.c = static_cast<double>(M * L) / static_cast<double>(N);
  return p;
}

ModelParams ModelParams::from_ratio(double c) {
  if (!std::isfinite(c) || c <= 0.0) throw InputError("ratio c must be positive and finite");
  ModelParams p;
  p.c = c;
  return p;
}

namespace {

void check_pole(const Spectrum& spec, cd w) {
  if (w.imag() != 0.0) return;
  for (double lam : spec.lambdas()) {
    if (w.real() == lam) throw NumericError("trace functional evaluated at an eigenvalue of R");
  }
}

}  // namespace

cd trace_resolvent(const Spectrum& spec, cd w) {
  check_pole(spec, w);
  const auto s = kernels::pole_sums(spec.lambdas(), spec.weights(), -w, 1.0);
  return s.r1 / static_cast<double>(spec.dimension());
}

cd trace_resolvent_derivative(const Spectrum& spec, cd w) {
  check_pole(spec, w);
  const auto s = kernels::pole_sums(spec.lambdas(), spec.weights(), -w, 1.0);
  return s.r1_sq / static_cast<double>(spec.dimension());
}

double trace_inverse(const Spectrum& spec) {
  double acc = 0.0;
  for (const auto& e : spec.entries()) acc += static_cast<double>(e.multiplicity) / e.lambda;
  return acc / static_cast<double>(spec.dimension());
}

MomentSummary moments(const Spectrum& spec, const ModelParams& params) {
  double s1 = 0.0, s2 = 0.0;
  for (const auto& e : spec.entries()) {
    const double m = static_cast<double>(e.multiplicity);
    s1 += m * e.lambda;
    s2 += m * e.lambda * e.lambda;
  }
  const double M = static_cast<double>(spec.dimension());
  MomentSummary out{s1 / M, s2 / M, 0.0};
  out.first_moment_mu = params.c * out.trR * out.trR2;
  return out;
}

}  // namespace rmt
