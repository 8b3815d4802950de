#include "dpd/errors.hpp"

namespace dpd {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::UnboundedBelow: return "UnboundedBelow";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::SingularProjection: return "SingularProjection";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::InvalidConstraint: return "InvalidConstraint";
    case ErrorKind::ConstraintInfeasible: return "ConstraintInfeasible";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::MCUnderResolved: return "MCUnderResolved";
    case ErrorKind::UnknownDataset: return "UnknownDataset";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace dpd
