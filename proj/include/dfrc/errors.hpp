#pragma once

#include <stdexcept>
#include <string>

namespace dfrc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: non-finite numbers, out-of-range parameters, shape
/// mismatches.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The requested design problem has an empty feasible set.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// The CU channel is parallel to the target channel.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// The conic solver did not return a usable solution.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared where the math guarantees a finite one.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Randomized rank-one recovery found no sample satisfying the constraints.
class RecoveryFailure : public Error {
 public:
  RecoveryFailure(const std::string& what, double relaxation_objective)
      : Error(what), relaxation_objective_(relaxation_objective) {}

  double relaxation_objective() const { return relaxation_objective_; }

 private:
  double relaxation_objective_;
};

}  // namespace dfrc
