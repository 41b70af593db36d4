#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadfun {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A frequency was passed to a weight family that does not contain it.
class SupportError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class SampleSizeError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

/// A spectral profile lacks a coefficient the estimator needs.
class CoverageError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

/// The weight pair cannot be estimated consistently (infinite estimand or rate).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class RateError : public InconsistencyError {
 public:
  using InconsistencyError::InconsistencyError;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 1-based line number, or 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A trigonometric density dips below zero somewhere on its validation grid.
class NonnegativityViolation : public Error {
 public:
  NonnegativityViolation(std::vector<double> point, double minimum);

  const std::vector<double>& point() const noexcept { return point_; }
  double minimum() const noexcept { return minimum_; }

 private:
  std::vector<double> point_;
  double minimum_;
};

}  // namespace quadfun
