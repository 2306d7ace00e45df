#include "nhtopo/errors.hpp"

namespace nhtopo {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ExceptionalPoint: return "ExceptionalPoint";
    case ErrorKind::BranchPole: return "BranchPole";
    case ErrorKind::BandTrackingLost: return "BandTrackingLost";
    case ErrorKind::UnwrapAmbiguous: return "UnwrapAmbiguous";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::DegenerateAverage: return "DegenerateAverage";
    case ErrorKind::PositivityLost: return "PositivityLost";
    case ErrorKind::NonHermitianResidual: return "NonHermitianResidual";
    case ErrorKind::EmptyProjection: return "EmptyProjection";
    case ErrorKind::SingleBandDegenerate: return "SingleBandDegenerate";
    case ErrorKind::DegenerateTexture: return "DegenerateTexture";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

NumericalError::NumericalError(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace nhtopo
