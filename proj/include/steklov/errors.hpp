#pragma once

// Exception taxonomy for the steklov library. Every failure that a caller
// can act on gets its own type; all derive from steklov::Error.

#include <array>
#include <stdexcept>
#include <string>

namespace steklov {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two objects built on different truncation grids were combined.
struct GridMismatch : Error {
  using Error::Error;
};

/// Integration was requested for a function with nonvanishing mean.
struct NonZeroMean : Error {
  using Error::Error;
};

/// An operator lacked the conjugation symmetry of a real operator.
struct NotRealOperator : Error {
  using Error::Error;
};

/// The evaluation point lies on (or numerically on) the image curve.
struct OnBoundaryCurve : Error {
  using Error::Error;
};

/// No spectral gap separates the candidate numerical ranks.
struct RankAmbiguous : Error {
  RankAmbiguous(const std::string& what, int lo, int hi, double gap_ratio)
      : Error(what), candidates{lo, hi}, gap(gap_ratio) {}
  std::array<int, 2> candidates;  // both defensible rank values
  double gap;                     // best separating ratio found
};

/// The winding quadrature failed to settle on an integer.
struct WindingIllConditioned : Error {
  using Error::Error;
};

/// Mesh fails a structural requirement (manifoldness, single boundary
/// loop, positive triangle areas, positive conformal factor).
struct DegenerateMesh : Error {
  using Error::Error;
};

/// Interior stiffness block could not be factorized.
struct SingularInterior : Error {
  using Error::Error;
};

/// Too few boundary vertices for the requested mode count.
struct Underresolved : Error {
  using Error::Error;
};

/// Winding field contains no positively wound cells.
struct EmptyRegion : Error {
  using Error::Error;
};

/// No kernel element produced a simple (degree one) boundary curve.
struct NoUnivalentCandidate : Error {
  using Error::Error;
};

/// No kernel element was usable as a boundary coordinate at some point.
struct NoCoordinateCandidate : Error {
  using Error::Error;
};

/// A witness function (or its reciprocal) left the kernel span.
struct WitnessNotInvertible : Error {
  using Error::Error;
};

/// Handle rank came out odd, which no surface admits.
struct OddRank : Error {
  using Error::Error;
};

}  // namespace steklov
