#pragma once

#include <stdexcept>
#include <string>

namespace jobprp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration, file or argument.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Orders cannot be carried by the available fleet.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// A solution slice violates flow balance or connectivity where the caller
// required a closed walk. Signals a separation or model bug.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

// The brute-force oracle refuses instances beyond its enumeration limits.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace jobprp
