#pragma once

#include <stdexcept>
#include <string>

namespace hklab {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape or argument-count mismatches (wrong number of variables, wrong order, ...).
struct StructuralError : Error {
  using Error::Error;
};

// Mathematically invalid input: division by a series with zero constant term,
// evaluation outside the gluing annulus, a pole of a fractional transformation.
struct DomainError : Error {
  using Error::Error;
};

// An integration left the declared chart (real box inflated by the tube radius).
struct DomainExitError : Error {
  DomainExitError(const std::string& what, double fraction)
      : Error(what), exit_fraction(fraction) {}
  double exit_fraction;  // fraction of the requested time completed before exit
};

// Coordinates or coefficients exceeded the configured blow-up bound.
struct BlowUpError : Error {
  BlowUpError(const std::string& what, double fraction)
      : Error(what), exit_fraction(fraction) {}
  double exit_fraction;
};

// A linear map that must be inverted is numerically singular.
struct SingularityError : Error {
  SingularityError(const std::string& what, double cond)
      : Error(what), condition_number(cond) {}
  double condition_number;
};

// Flatness gate: an operation that requires zero curvature was given a curved spec.
struct CurvatureError : Error {
  CurvatureError(const std::string& what, double residual)
      : Error(what), curvature_residual(residual) {}
  double curvature_residual;
};

// A point left the trust radius of a Taylor-represented vector field.
struct TrustRadiusError : Error {
  using Error::Error;
};

// Bad CLI flags, unknown suite/example names, malformed spec files.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace hklab
