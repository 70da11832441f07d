#pragma once

#include <stdexcept>
#include <string>

namespace npiv {

// Malformed or inconsistent data (lengths, non-finite values, empty sets).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A tuning parameter violates its precondition (h <= 0, a <= 0, M < 2, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A query point lies outside the unit cube the estimators are defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An internal numerical invariant failed (e.g. a ridged PSD system that does
// not factorize). Indicates a bug or pathological input, never a user error.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace npiv
