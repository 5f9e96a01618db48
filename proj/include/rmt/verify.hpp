#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmt/model.hpp"
#include "rmt/report.hpp"

namespace rmt {

/// desk: one realization and a moderate density grid.
/// paper: several realizations and a finer grid.
enum class Scale { Desk, Paper };

struct VerifyOptions {
  Scale scale = Scale::Desk;
  std::uint64_t seed = 20150601;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool passed() const;
};

/// A named spectrum/ratio pair used by several criteria.
struct TestCase {
  std::string name;
  Spectrum spectrum;
  ModelParams params;
};

/// R = I with c = 1/2; two atoms {3, 1} with c = 1; the cosine profile with
/// M = 500, L = 2, N = 1500.
std::vector<TestCase> reference_cases();
TestCase flagship_case();

/// 100 points x + iy with x in [-2, 8] and y log-spaced in [1e-3, 5].
std::vector<cd> residual_grid();

CriterionResult check_scalar_closed_form();
CriterionResult check_equation_residuals();
CriterionResult check_measure_identities(const VerifyOptions& opts);
CriterionResult check_edge_asymptotics();
CriterionResult check_atom(const VerifyOptions& opts);
CriterionResult check_flagship(const VerifyOptions& opts);
CriterionResult check_stieltjes_oracle(const VerifyOptions& opts);
CriterionResult check_free_probability(const VerifyOptions& opts);
CriterionResult check_diagnostics();

/// Criterion `id` in 1..9.
CriterionResult run_criterion(int id, const VerifyOptions& opts);
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts);

}  // namespace rmt
