#pragma once

#include <stdexcept>
#include <string>

namespace semid {

enum class ErrorCode {
  // model construction
  DuplicateVariable,
  UnknownVariable,
  OrderViolation,
  SelfLoop,
  SupportMismatch,
  NotPositiveDefinite,
  // parsing
  SyntaxError,
  MissingVarLine,
  DimensionMismatch,
  NotSymmetric,
  UnknownLabel,
  // graph / expression queries
  IndexOutOfRange,
  EndpointInConditioningSet,
  NotAParent,
  InvalidExpression,
  // numeric evaluation
  SingularSubmatrix,
  DivisionByZero,
  IllConditionedExpression,
  NonPositiveVariance,
  // flow / solver internals
  MalformedPath,
  Def2ViolationInternal,
  DegenerateBlock,
};

const char* error_code_name(ErrorCode code);

// Single exception type for the whole library; `line` is set by the text
// parsers so callers can point at the offending input line (0 = not set).
class SemError : public std::runtime_error {
 public:
  SemError(ErrorCode code, std::string message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : std::move(message)),
        code_(code),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  int line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  int line_;
};

}  // namespace semid
