#pragma once

#include <stdexcept>
#include <string>

namespace pla {

// Raised for malformed or out-of-contract arguments. Maps to exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when an iterative routine does not converge. Maps to exit code 3.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pla
