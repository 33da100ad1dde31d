#pragma once

#include <span>
#include <vector>

#include "sublevel_sense/precession.hpp"

namespace sublevel_sense {

/// One step of the imagined measurement sequence.  After every null outcome
/// the state collapses onto the unmeasured sublevels and renormalizes, so
/// both the conditional probability and its slope differ from the
/// unconditional ones.
struct SequentialStep {
  SublevelIndex measured_m;
  double occurrence_weight;  // product of prior null-outcome probabilities
  double conditional_p;
  double conditional_slope;  // per radian
  double delta_phi;          // radians; +infinity when the step carries no information
};

/// Per-phase sensitivity summary: unconditional per-level uncertainties, the
/// sequential steps, and the combined uncertainty
/// 1/delta_phi_c^2 = sum_k 1/delta_phi_k^2.
struct UncertaintyReport {
  double phase;
  std::vector<double> per_level;      // delta_phi_m, m = +F..-F
  std::vector<SequentialStep> steps;  // informative steps; the forced final one is omitted
  double combined;                    // delta_phi_c, radians
};

/// Sequential-collapse analysis of measuring every sublevel once, in the
/// given order (a permutation of all 2F+1 sublevels).  The last measurement
/// finds the atom with certainty and contributes nothing; if the remaining
/// probability is exhausted earlier (< 1e-12) the chain stops there.
UncertaintyReport sequential_uncertainties(const PrecessionSetup& setup,
                                           std::span<const SublevelIndex> order);

/// Same, with the default order: m descending from +F.
UncertaintyReport sequential_uncertainties(const PrecessionSetup& setup);

/// One report per grid phase; steps with infinite uncertainty contribute
/// zero to the combination, so degenerate phases yield sentinels rather
/// than errors.  Phases are processed in parallel, results in grid order.
std::vector<UncertaintyReport> combined_uncertainty_scan(const PrecessionSetup& setup,
                                                         std::span<const double> phases);

/// Uncertainty scaling with F.  All entries are delta_phi values:
/// larmor = 1/sqrt(2F); combined_from_center computed by the sequential
/// analysis starting from |F,0>_x (integer F) or |F,1/2>_x (half-integer);
/// optimal = 1/(2F), the stretched-superposition bound.
struct ScalingRow {
  int twice_f;
  double larmor;
  double combined_from_center;
  double optimal;
};

std::vector<ScalingRow> scaling_table(SpinF f_max);

/// Phase at which scaling_table evaluates the (phase-independent) combined
/// sensitivity; any generic phase away from multiples of pi works.
inline constexpr double kGenericPhase = 0.7;

}  // namespace sublevel_sense
