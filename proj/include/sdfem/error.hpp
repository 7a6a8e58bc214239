#pragma once

#include <stdexcept>
#include <string>

namespace sdfem {

// Invalid user input (mesh parameters, placements, config keys).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Linear solver breakdown. Carries the achieved residual and a 1-norm
// condition estimate when one could be computed.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, double residual, double condition_estimate)
      : std::runtime_error(what), residual_(residual), condition_(condition_estimate) {}

  double residual() const noexcept { return residual_; }
  double condition_estimate() const noexcept { return condition_; }

private:
  double residual_;
  double condition_;
};

}  // namespace sdfem
