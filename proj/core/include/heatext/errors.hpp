#pragma once

#include <stdexcept>
#include <string>

namespace heatext {

// Argument outside the mathematical domain of an operation (theta = 0 passed
// to robin_coefficient, t <= 0 for a kernel, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller violated a documented precondition of an operation.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Fields or profiles living on grids that cannot be combined.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Not enough data to carry out a fit or a check.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Invalid user input (function descriptors, config values).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedFeature : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN/overflow during time stepping or a failed linear solve.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, long step = -1)
      : std::runtime_error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace heatext
