#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace strainlim {

enum class ErrorCode {
  NotPositiveDefinite,
  Singular,
  InvalidAxis,
  OutOfDomain,
  InadmissibleDelta,
  NonpositiveModulus,
  SingularLeading,
  NoConvergence,
  FitUnderdetermined,
  AllZeroResiduals,
  DomainError,
  Saturation,
  ConfigInvalid,
  StudyFailed,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Every failure path throws this with a code that
/// callers can branch on; the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace strainlim
