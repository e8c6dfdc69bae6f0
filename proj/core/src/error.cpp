#include "maxprin/error.hpp"

namespace maxprin {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveWarp: return "NonPositiveWarp";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::AssemblyError: return "AssemblyError";
    case ErrorKind::SolverDiverged: return "SolverDiverged";
    case ErrorKind::IndefiniteOperator: return "IndefiniteOperator";
    case ErrorKind::NoCertificate: return "NoCertificate";
    case ErrorKind::SignError: return "SignError";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorKind::NotASubsolution: return "NotASubsolution";
    case ErrorKind::ShiftTooSmall: return "ShiftTooSmall";
    case ErrorKind::BarrierNotPositive: return "BarrierNotPositive";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::NonmonotoneLineSearch: return "NonmonotoneLineSearch";
    case ErrorKind::QuadratureUnderflow: return "QuadratureUnderflow";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace maxprin
