#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dpd {

enum class ErrorKind {
  DomainError,
  NonConvergent,
  UnboundedBelow,
  NotSymmetric,
  NotPositiveDefinite,
  SingularProjection,
  RankMismatch,
  InvalidConstraint,
  ConstraintInfeasible,
  DegenerateData,
  DegenerateVariance,
  MCUnderResolved,
  UnknownDataset,
  IoError,
  ParseError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the CLI in particular) can map it onto a structured report.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dpd
