#include "randpoly/error.hpp"

namespace randpoly {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::ConstructionFailure: return "construction-failure";
    case ErrorKind::CenterNotInterior: return "center-not-interior";
    case ErrorKind::PolarRequiresOrigin: return "polar-requires-origin";
    case ErrorKind::IncompatibleRepresentation: return "incompatible-representation";
    case ErrorKind::PointNotInterior: return "point-not-interior";
    case ErrorKind::DisjointInteriors: return "disjoint-interiors";
    case ErrorKind::UnsupportedDensity: return "unsupported-density";
    case ErrorKind::ParameterRegime: return "parameter-regime";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::PossiblyEmpty: return "possibly-empty";
    case ErrorKind::EmptyLevelSet: return "empty-level-set";
    case ErrorKind::DeltaTooLarge: return "delta-too-large";
    case ErrorKind::InvalidPolygon: return "invalid-polygon";
    case ErrorKind::EnvelopeFailure: return "envelope-failure";
    case ErrorKind::DegenerateHull: return "degenerate-hull";
    case ErrorKind::CapExceeded: return "cap-exceeded";
    case ErrorKind::OutOfFamily: return "out-of-family";
    case ErrorKind::ConfigError: return "config-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace randpoly
