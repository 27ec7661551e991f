#pragma once

#include <stdexcept>
#include <string>

namespace alexkit {

// Root of every error raised by the toolkit.
class GeometryError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of a function (e.g. f_c at a pole of sn).
class DomainError : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

// Target value outside the image of a bracketed monotone inversion.
class RangeError : public GeometryError {
  public:
    RangeError(const std::string& what, double lo, double hi)
        : GeometryError(what), bracket_lo(lo), bracket_hi(hi) {}
    double bracket_lo;
    double bracket_hi;
};

// Sides violate the triangle inequality.
class InadmissibleTriangle : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

// kappa > 0 and the perimeter reaches 2*pi/sqrt(kappa): no model triangle exists.
class UndefinedAngle : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

// A side adjacent to the requested vertex has zero length.
class DegenerateSide : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

// Target vertex cannot be reached in the requested subgraph.
class Unreachable : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

// The discretization is too coarse for the requested check.
class InsufficientResolution : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

}  // namespace alexkit
