#pragma once

#include "sublevel_sense/precession.hpp"

namespace sublevel_sense {

/// Direction of the transverse field component.  The printed remap
/// sin(beta/2) = sin(phi/2) cos(gamma) corresponds to azimuth x (transverse
/// along the preparation axis); for azimuth y the angle between the
/// preparation axis and its image is phi itself.
enum class TransverseAzimuth { x, y };

/// Precession about a field tilted by gamma from z, through rotation angle
/// phi about the field axis, measured back in the x basis.
struct TiltedFieldSetup {
  SpinF f;
  StateVector initial;  // declared in the x basis
  double gamma = 0.0;   // radians, in [0, pi/2)
  TransverseAzimuth azimuth = TransverseAzimuth::x;
  double phase = 0.0;  // rotation angle phi about the field axis, radians

  static TiltedFieldSetup make(StateVector initial, double gamma, TransverseAzimuth azimuth,
                               double phase);
};

/// Angle between the preparation axis x and its rotated image:
/// beta = 2 asin(sin(phi/2) cos(gamma)), returned in [0, pi].  Symmetric
/// about phi = pi; never enters (pi - 2 gamma, pi + 2 gamma).
double beta_from_phi(double phi, double gamma);

/// Full evolution under H = (phi/2pi) (sin(gamma) F_a + cos(gamma) F_z) for
/// unit time, i.e. a rotation by phi about the tilted field axis, measured
/// in the x basis.  Probabilities and analytic d/dphi.
SublevelProbabilities tilted_precession(const TiltedFieldSetup& setup);

}  // namespace sublevel_sense
