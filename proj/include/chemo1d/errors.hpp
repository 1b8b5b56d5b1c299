#pragma once

#include <stdexcept>
#include <string>

namespace chemo1d {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, CLI argument, or config-file content.
struct ConfigError : Error {
  using Error::Error;
};

/// A time step could not be completed. Carries the failing step index and time.
struct SolverError : Error {
  int step;
  double time;
  SolverError(const std::string& what, int step_, double time_)
      : Error(what + " (step " + std::to_string(step_) +
              ", t = " + std::to_string(time_) + ")"),
        step(step_),
        time(time_) {}
};

/// Picard iteration hit its cap without meeting the tolerance.
struct NonConvergenceError : SolverError {
  double residual;
  NonConvergenceError(const std::string& what, int step, double time, double res)
      : SolverError(what, step, time), residual(res) {}
};

/// Iterates or solution values became non-finite.
struct DivergedError : SolverError {
  using SolverError::SolverError;
};

/// Tridiagonal elimination met a pivot below the singularity threshold.
struct SingularSystemError : SolverError {
  using SolverError::SolverError;
};

}  // namespace chemo1d
