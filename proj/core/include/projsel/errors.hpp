#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace projsel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters that violate a model invariant (e.g. non-monotone thresholds).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (dimension mismatch, bad CSV cell, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Optimizer failure. Carries the last iterate and its gradient norm.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, Eigen::VectorXd last_iterate,
                 double gradient_norm)
      : Error(what),
        last_iterate_(std::move(last_iterate)),
        gradient_norm_(gradient_norm) {}

  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  Eigen::VectorXd last_iterate_;
  double gradient_norm_;
};

}  // namespace projsel
