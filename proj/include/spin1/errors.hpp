#pragma once

#include <stdexcept>
#include <string>

namespace spin1 {

// Failure of a numerical routine (non-convergence, breakdown, overflow) as
// opposed to bad input, which is reported with std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spin1
