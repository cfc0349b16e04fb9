#pragma once

#include <stdexcept>
#include <string>

namespace quac {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (empty clouds, bad mark sets, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The time integrator lost unitarity; usually the step count is too small.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// The algorithm does not apply to this input (e.g. spectral clustering on a
/// disconnected graph). Harnesses record it as a skip.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

/// A structured Hamiltonian could not be built from the given graph/marks.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// File or stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace quac
