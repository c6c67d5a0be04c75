#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace loglin {

/// Matrix passed to vee() is not in se2(3) (wrong sparsity or non-skew rotation block).
class NotInAlgebra : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rotation angle too close to pi for the logarithm / inverse Jacobians.
class NearSingularity : public std::domain_error {
 public:
  explicit NearSingularity(const std::string& what,
                           std::optional<double> last_valid_time = std::nullopt)
      : std::domain_error(what), last_valid_time_(last_valid_time) {}

  /// Set when raised from a propagation: time of the last sample that was valid.
  [[nodiscard]] std::optional<double> last_valid_time() const { return last_valid_time_; }

 private:
  std::optional<double> last_valid_time_;
};

/// Gravity evaluated inside the guard radius around the attracting center.
class OriginSingularity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument outside the mathematical domain of a formula (bounds, orbit elements).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class StepSizeUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GainSynthesisFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A run-time check of a verified property failed (bound exceeded, residual too large).
class BoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace loglin
