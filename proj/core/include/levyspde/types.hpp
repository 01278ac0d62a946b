#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace levyspde {

/// Coefficient vector in the spectral basis {e_1, ..., e_m}.
using Vector = Eigen::VectorXd;
/// Dense matrix; used for Hilbert-Schmidt noise operators and Jacobians.
using Matrix = Eigen::MatrixXd;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a coefficient returns non-finite values during an audit.
class AuditFailure : public std::runtime_error {
 public:
  AuditFailure(const std::string& what, std::vector<Vector> witness)
      : std::runtime_error(what), witness_(std::move(witness)) {}
  const std::vector<Vector>& witness() const noexcept { return witness_; }

 private:
  std::vector<Vector> witness_;
};

/// Implicit drift solve did not converge.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace levyspde
