#pragma once

#include <stdexcept>
#include <string>

namespace nhg {

// Every failure raised by the core derives from Error so the C API can map
// it onto a status code without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range user input (node ids, labels, probabilities).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Tensor or operator dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An operation was called in the wrong order (e.g. backward before forward).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Unknown key, missing key or invalid value in a run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File-system failure or malformed file. Carries the offending path/line in
/// the message.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A training run produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace nhg
