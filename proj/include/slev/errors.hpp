#pragma once

#include <stdexcept>
#include <string>

namespace slev {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or malformed input (bad kernel parameters,
// unreadable files, inconsistent sizes).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Mathematical precondition violated (argument outside the domain of a
// formula, nonpositive density, 2*alpha <= d, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A dense path was asked to exceed its configured size cap. The caller
// should fall back to the analytic path.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Matrix factorization failed (input not positive definite, singular
// reduced system).
class LinalgError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature ran out of depth or panels before meeting its
// tolerance. Carries the best estimate so far and the estimated error.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& msg, double best_estimate, double error_bound)
      : Error(msg), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const { return best_estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

// Semi-infinite integrand whose tail contributions do not shrink.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace slev
