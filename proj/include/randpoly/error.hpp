#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace randpoly {

enum class ErrorKind {
  InvalidParameter,
  ConstructionFailure,
  CenterNotInterior,
  PolarRequiresOrigin,
  IncompatibleRepresentation,
  PointNotInterior,
  DisjointInteriors,
  UnsupportedDensity,
  ParameterRegime,
  OutOfDomain,
  PossiblyEmpty,
  EmptyLevelSet,
  DeltaTooLarge,
  InvalidPolygon,
  EnvelopeFailure,
  DegenerateHull,
  CapExceeded,
  OutOfFamily,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// that callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace randpoly
