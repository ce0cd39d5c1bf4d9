#pragma once

#include <stdexcept>
#include <string>

namespace shapelab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: invalid domain data, parameters out of range, missing files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not deliver a result.
class SolverError : public Error {
 public:
  using Error::Error;
};

class InvalidDomain : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class HardCapViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotNested : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GridTooCoarse : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateMesh : public SolverError {
 public:
  using SolverError::SolverError;
};

class SolveFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

class NoConvergence : public SolverError {
 public:
  NoConvergence(const std::string& what, int iterations)
      : SolverError(what + " (" + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

}  // namespace shapelab
