#pragma once

#include <stdexcept>
#include <string>

namespace nhtopo {

enum class ErrorKind {
  ExceptionalPoint,
  BranchPole,
  BandTrackingLost,
  UnwrapAmbiguous,
  NotConverged,
  DegenerateAverage,
  PositivityLost,
  NonHermitianResidual,
  EmptyProjection,
  SingleBandDegenerate,
  DegenerateTexture,
  LengthMismatch,
};

const char* to_string(ErrorKind kind) noexcept;

// Raised when a computation hits a numerically ill-posed point.
class NumericalError : public std::runtime_error {
public:
  NumericalError(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace nhtopo
