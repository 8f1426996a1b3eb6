#pragma once

#include <stdexcept>
#include <string>

namespace rydress {

// Invalid physical input (negative rates, r <= 0, zero detuning where a
// dressed branch must be defined, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to deliver a result within tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adiabatic branch following lost the state (eigenvector overlap too small),
// typically near an anti-blockade resonance.
class BranchTrackingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ExtractionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotFoundError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A protocol precondition was violated while running in strict mode.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rydress
