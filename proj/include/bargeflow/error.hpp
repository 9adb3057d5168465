#pragma once

#include <stdexcept>
#include <string>

namespace bargeflow {

// Malformed input: bad indices, inconsistent dimensions, invalid options.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The LP kernel could not recover a nonsingular basis.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver reached a state that contradicts a model guarantee, e.g. an
// infeasible recourse problem although shortage variables absorb all demand.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bargeflow
