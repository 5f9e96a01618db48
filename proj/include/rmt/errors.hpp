#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rmt {

/// Malformed or out-of-domain user input (bad spectrum file, invalid dims).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to produce a certified result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-point / Newton failure; carries the last iterate for diagnosis.
class SolverError : public NumericError {
 public:
  SolverError(const std::string& what, std::complex<double> last, double residual)
      : NumericError(what), last_iterate_(last), residual_(residual) {}

  std::complex<double> last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::complex<double> last_iterate_;
  double residual_;
};

}  // namespace rmt
