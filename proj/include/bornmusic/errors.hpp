#pragma once

#include <stdexcept>
#include <string>

namespace bornmusic {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a singular point (zero Hankel argument, coincident points).
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Invalid configuration or scene description.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An iterative or truncated algorithm failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The Bessel-series truncation ceiling is too small for the requested accuracy.
class TruncationError : public NumericalError {
 public:
  TruncationError(const std::string& message, int required_order)
      : NumericalError(message), required_order_(required_order) {}

  int required_order() const noexcept { return required_order_; }

 private:
  int required_order_;
};

/// Input data carries no signal (e.g. leading singular value zero).
class DegenerateDataError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace bornmusic
