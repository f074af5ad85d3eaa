#include "strainlim/errors.hpp"

namespace strainlim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::InvalidAxis: return "InvalidAxis";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InadmissibleDelta: return "InadmissibleDelta";
    case ErrorCode::NonpositiveModulus: return "NonpositiveModulus";
    case ErrorCode::SingularLeading: return "SingularLeading";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::FitUnderdetermined: return "FitUnderdetermined";
    case ErrorCode::AllZeroResiduals: return "AllZeroResiduals";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Saturation: return "Saturation";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::StudyFailed: return "StudyFailed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace strainlim
