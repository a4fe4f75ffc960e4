#pragma once

#include <stdexcept>
#include <string>

namespace fputw {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or structural invariant was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Newton iteration exhausted its budget.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_residual, int iterations)
      : Error(what), last_residual_(last_residual), iterations_(iterations) {}
  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

/// Root bracketing failed (e.g. speed at or below the sound speed).
class NoBracket : public Error {
 public:
  using Error::Error;
};

class DegenerateNormalization : public Error {
 public:
  using Error::Error;
};

class UnreliableQuadrature : public Error {
 public:
  UnreliableQuadrature(const std::string& what, double value, double refined)
      : Error(what), value_(value), refined_(refined) {}
  double value() const noexcept { return value_; }
  double refined() const noexcept { return refined_; }

 private:
  double value_;
  double refined_;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  enum class Kind { Corrupt, VersionMismatch, Io };
  CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace fputw
