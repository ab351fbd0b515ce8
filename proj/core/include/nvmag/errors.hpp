#pragma once

#include <stdexcept>
#include <string>

namespace nvmag {

// Parameter outside its physical or numerical domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Flat response with no usable operating point.
class NoSetpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Records that cannot be summed (rate, unit or length mismatch).
class CompositionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nvmag
