#pragma once

#include <stdexcept>
#include <string>

namespace noisemem {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (negative offset, q > 1, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Evaluation at a point where the function has a pole (g at x = 0).
class DivergenceError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Parameters for which a closed form has a vanishing denominator.
class SingularParameterError : public DomainError {
public:
  using DomainError::DomainError;
};

/// A photon-count law was requested for a state without one.
class UnsupportedSamplingError : public Error {
public:
  using Error::Error;
};

/// Field covariance is not positive semidefinite beyond round-off.
class CovarianceModelError : public Error {
public:
  using Error::Error;
};

/// Too little data to form an estimate or its error bar.
class EstimationError : public Error {
public:
  using Error::Error;
};

} // namespace noisemem
