#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tsam {

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by a target when a density cannot be evaluated at a point.
/// Samplers catch it, count it and treat the point as having zero density.
class TargetEvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailure : public TargetEvaluationError {
 public:
  using TargetEvaluationError::TargetEvaluationError;
};

class DataShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateSeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Carries every violation found while validating a configuration.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace tsam
