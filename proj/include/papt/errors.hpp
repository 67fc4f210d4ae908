#pragma once

#include <stdexcept>
#include <string>

namespace papt {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs outside an operation's domain (bad config, EP where eigenvectors
/// are required, invalid basis, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// δ = κ = 0: no regime can be assigned.
class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

/// Eigenvectors coalesce at the exceptional point.
class CoalescenceError : public InputError {
 public:
  using InputError::InputError;
};

/// Symmetric region or EP: the quadratic Hamiltonian has no ground state.
class NoGroundStateError : public InputError {
 public:
  using InputError::InputError;
};

/// A numerical validity check failed (truncation, symplectic breach,
/// ill-conditioned estimator, step control).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IllConditionedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace papt
