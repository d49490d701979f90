#pragma once

#include <stdexcept>
#include <string>

namespace dualwave {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

/// Invalid parameters, malformed configuration, violated preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

/// Sample vector does not match the grid it is used with.
class ShapeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "shape"; }
};

/// A numerical procedure failed (non-convergence, lost bracket, ...).
class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric"; }
};

/// Value not representable in double precision (exp overflow cap).
class RangeError : public NumericError {
 public:
  using NumericError::NumericError;
  const char* kind() const noexcept override { return "range"; }
};

/// The fiber derivative never changes sign on [1e-6, 1e6].
class NoFiberRoot : public NumericError {
 public:
  using NumericError::NumericError;
  const char* kind() const noexcept override { return "no_fiber_root"; }
};

/// Threshold bisection was given a bracket without a sign change.
class NoSignChange : public NumericError {
 public:
  using NumericError::NumericError;
  const char* kind() const noexcept override { return "no_sign_change"; }
};

/// The kinetic cap of the local minimization kept rejecting steps.
class CapSaturated : public NumericError {
 public:
  using NumericError::NumericError;
  const char* kind() const noexcept override { return "cap_saturated"; }
};

}  // namespace dualwave
