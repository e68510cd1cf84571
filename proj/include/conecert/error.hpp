#pragma once

#include <stdexcept>
#include <string>

namespace conecert {

enum class Errc {
  DimensionMismatch,
  NotInterior,
  SingularMatrix,
  NotSymmetric,
  RankDeficient,
  EmptyInterior,
  HNotValidForCone,
  MaxIters,
  ExactUnavailable,
  NotCertificate,
  NotDualFeasible,
  CenteringFailed,
  StepFailed,
  DegreeMismatch,
  UncoverableTerm,
  UnsupportedShape,
  MalformedPart,
  ConfigError,
  ParseError,
};

const char* to_string(Errc code) noexcept;

/// Every failure in the library surfaces as this exception; `code()` is the
/// machine-readable part, `what()` carries context for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace conecert
