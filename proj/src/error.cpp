#include "conecert/error.hpp"

namespace conecert {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotInterior: return "NotInterior";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::EmptyInterior: return "EmptyInterior";
    case Errc::HNotValidForCone: return "HNotValidForCone";
    case Errc::MaxIters: return "MaxIters";
    case Errc::ExactUnavailable: return "ExactUnavailable";
    case Errc::NotCertificate: return "NotCertificate";
    case Errc::NotDualFeasible: return "NotDualFeasible";
    case Errc::CenteringFailed: return "CenteringFailed";
    case Errc::StepFailed: return "StepFailed";
    case Errc::DegreeMismatch: return "DegreeMismatch";
    case Errc::UncoverableTerm: return "UncoverableTerm";
    case Errc::UnsupportedShape: return "UnsupportedShape";
    case Errc::MalformedPart: return "MalformedPart";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace conecert
