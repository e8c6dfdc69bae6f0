#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maxprin {

enum class ErrorKind {
  NonPositiveWarp,
  DomainError,
  DimensionMismatch,
  AssemblyError,
  SolverDiverged,
  IndefiniteOperator,
  NoCertificate,
  SignError,
  ZeroVector,
  MonotonicityViolation,
  NotASubsolution,
  ShiftTooSmall,
  BarrierNotPositive,
  NewtonDiverged,
  NonmonotoneLineSearch,
  QuadratureUnderflow,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` says which contract broke.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace maxprin
