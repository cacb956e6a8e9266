#pragma once

#include <stdexcept>
#include <string>

namespace umwave {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid scenario or solver configuration. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// X + Xi has an entry too close to zero to be normalized back onto UM(N,M).
class RetractionError : public Error {
 public:
  using Error::Error;
};

// Merged-gradient precomputation would exceed the configured memory cap.
class MemoryCapError : public Error {
 public:
  using Error::Error;
};

// Numerical pathology during post-hoc evaluation (zero normalizer, bad file).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace umwave
