#ifndef XYENT_ERROR_HPP
#define XYENT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace xyent {

enum class ErrorCode {
  EvenN,
  OutOfRangeGamma,
  NegativeLambda,
  InvalidSize,
  SizeTooLarge,
  NoConvergence,
  SameSite,
  QuadratureNoConvergence,
  MissingGEntry,
  RMaxTooLarge,
  NotPositive,
  SpectrumInconsistent,
  StepTooSmall,
  NoInteriorMinimum,
  DegenerateDesign,
  SignChange,
  ZeroDenominator,
  NoOverlap,
  FlatObjective,
  MissingSeries,
  BadConfig,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (and the CLI
// exit-status mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xyent

#endif
