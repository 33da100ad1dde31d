#pragma once

#include <span>
#include <vector>

#include "sublevel_sense/spin.hpp"

namespace sublevel_sense {

/// Precession geometry: a state prepared in the x basis precesses about z by
/// phase phi and is measured back in the x basis.  Measurement axis equals
/// the preparation axis throughout.
struct PrecessionSetup {
  SpinF f;
  StateVector initial;  // declared in the x basis
  double phase = 0.0;   // radians

  static PrecessionSetup make(StateVector initial, double phase);
};

/// Detection probabilities p_m over m = +F..-F and their analytic phase
/// derivatives.  sum(p) == 1 and sum(dp) == 0 within 1e-10.
struct SublevelProbabilities {
  std::vector<double> p;
  std::vector<double> dp_dphi;  // per radian
};

/// Shared kernel for phase sweeps: converts the initial x-basis state to z
/// amplitudes once, then evaluates measured amplitudes and their
/// phi-derivatives at any phase.  Pure and safe for concurrent use.
class PrecessionEngine {
 public:
  explicit PrecessionEngine(StateVector initial);

  SpinF f() const { return f_; }

  /// Measured x-basis amplitudes a_m(phi) and da_m/dphi.
  void amplitudes_at(double phi, std::vector<Complex>& a, std::vector<Complex>& da) const;

  SublevelProbabilities probabilities_at(double phi) const;

 private:
  SpinF f_;
  std::vector<Complex> z_amps_;
  const RealMatrix* d_half_pi_;
};

/// Rotate the initial x-basis state to z, advance each z amplitude by
/// e^{-i m phi}, rotate back, square.  Derivatives carry the extra (-i m)
/// factor through the same path.
SublevelProbabilities sublevel_probabilities(const PrecessionSetup& setup);

struct FxExpectation {
  double value;
  double variance;
  double d_value_dphi;
};

/// <F_x>, its variance, and the analytic phase derivative of the mean.
FxExpectation expectation_fx(const PrecessionSetup& setup);

/// Projection noise over slope for one sublevel:
/// sqrt(p_m (1 - p_m)) / |dp_m/dphi|.  Returns +infinity when the slope
/// magnitude is below 1e-12: zero slope means zero information, not an error.
double single_level_uncertainty(const PrecessionSetup& setup, SublevelIndex m);

/// Shared slope cutoff for uncertainty sentinels.
inline constexpr double kSlopeEpsilon = 1e-12;

/// sqrt(variance)/|slope| with the same sentinel convention.
double uncertainty_from(double variance, double slope);

/// 1/delta_phi with the sentinel mapped to 0 (zero information).
double inverse_or_zero(double delta_phi);

}  // namespace sublevel_sense
