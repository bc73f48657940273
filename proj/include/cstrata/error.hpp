#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cstrata {

enum class ErrorKind {
  NotPrime,
  SearchExhausted,
  DegreeMismatch,
  TooLarge,
  PrecisionTooLarge,
  BackendMismatch,
  NonIntegralBreakPoint,
  RankMismatch,
  BadIndex,
  Infeasible,
  PreconditionViolated,
  PrecisionTooSmall,
  NotIsogeny,
  RankCapExceeded,
  RingMismatch,
  NoSplit,
  NoStabilization,
  MalformedSystem,
  NotIsogenyAtPoint,
  BudgetExceeded,
  InsufficientData,
  InvalidInput,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace cstrata
