#pragma once

#include <stdexcept>
#include <string>

namespace pulsevqe {

// Bad user-supplied data: files, dimensions, labels, out-of-range values.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally invalid configuration, e.g. a coupling index outside the
// device or an unknown parameterization label.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Argument outside its mathematical domain, e.g. a sample time outside
// the pulse interval.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A numerical consistency check failed mid-computation (non-finite value,
// imaginary part of a real quantity above threshold).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pulsevqe
