#include "sublevel_sense/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sublevel_sense/parallel.hpp"

namespace sublevel_sense {

namespace {

constexpr double kExhaustedProbability = 1e-12;

void check_permutation(SpinF f, std::span<const SublevelIndex> order) {
  if (order.size() != f.dimension()) {
    throw std::invalid_argument("sequential_uncertainties: order must list all 2F+1 sublevels");
  }
  std::vector<bool> seen(f.dimension(), false);
  for (const SublevelIndex m : order) {
    validate_sublevel(f, m);
    const std::size_t slot = slot_of(f, m);
    if (seen[slot]) throw std::invalid_argument("sequential_uncertainties: order repeats a sublevel");
    seen[slot] = true;
  }
}

UncertaintyReport report_at(const PrecessionEngine& engine, double phase,
                            std::span<const SublevelIndex> order) {
  const SpinF f = engine.f();
  const SublevelProbabilities probs = engine.probabilities_at(phase);
  const std::size_t n = probs.p.size();

  UncertaintyReport report;
  report.phase = phase;
  report.per_level.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double complement = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) complement += probs.p[j];
    }
    report.per_level[i] =
        uncertainty_from(probs.p[i] * complement, probs.dp_dphi[i]);
  }

  // Collapse chain.  The remaining (occurrence) probability after k null
  // outcomes telescopes to the sum of the unmeasured unconditional p's,
  // which we track as a direct sum to avoid cancellation near exhaustion.
  std::vector<bool> measured(n, false);
  double inv_sq_sum = 0.0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const std::size_t slot = slot_of(f, order[k]);
    measured[slot] = true;

    double remaining = 0.0, remaining_slope = 0.0;  // before this measurement
    for (std::size_t j = 0; j < n; ++j) {
      if (!measured[j] || j == slot) {
        remaining += probs.p[j];
        remaining_slope += probs.dp_dphi[j];
      }
    }
    if (remaining < kExhaustedProbability) break;  // nothing left to learn

    const double weight = remaining;  // occurrence probability of reaching this step
    const double p = probs.p[slot];
    const double p_dot = probs.dp_dphi[slot];
    const double q = p / remaining;
    // Quotient rule through the renormalization.
    const double q_dot = (p_dot * remaining - p * remaining_slope) / (remaining * remaining);

    double delta_phi;
    if (std::abs(q_dot) < kSlopeEpsilon) {
      delta_phi = std::numeric_limits<double>::infinity();
    } else {
      // q (1 - q) with 1 - q formed from the unmeasured remainder.
      const double q_complement = std::max(0.0, (remaining - p) / remaining);
      delta_phi = std::sqrt(std::max(0.0, q * q_complement)) / (std::sqrt(weight) * std::abs(q_dot));
    }
    report.steps.push_back(SequentialStep{order[k], weight, q, q_dot, delta_phi});
    if (std::isfinite(delta_phi) && delta_phi > 0.0) {
      inv_sq_sum += 1.0 / (delta_phi * delta_phi);
    }
  }

  report.combined = inv_sq_sum > 0.0 ? 1.0 / std::sqrt(inv_sq_sum)
                                     : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace

UncertaintyReport sequential_uncertainties(const PrecessionSetup& setup,
                                           std::span<const SublevelIndex> order) {
  check_permutation(setup.f, order);
  return report_at(PrecessionEngine(setup.initial), setup.phase, order);
}

UncertaintyReport sequential_uncertainties(const PrecessionSetup& setup) {
  const std::vector<SublevelIndex> order = all_sublevels(setup.f);
  return sequential_uncertainties(setup, order);
}

std::vector<UncertaintyReport> combined_uncertainty_scan(const PrecessionSetup& setup,
                                                         std::span<const double> phases) {
  const std::vector<SublevelIndex> order = all_sublevels(setup.f);
  const PrecessionEngine engine(setup.initial);
  std::vector<UncertaintyReport> out(phases.size());
  parallel_for(phases.size(), [&](std::size_t i) { out[i] = report_at(engine, phases[i], order); });
  return out;
}

std::vector<ScalingRow> scaling_table(SpinF f_max) {
  std::vector<ScalingRow> rows;
  for (int twice_f = 1; twice_f <= f_max.twice_f; ++twice_f) {
    const SpinF f{twice_f};
    const SublevelIndex start{f.is_integer() ? 0 : 1};  // |F,0> or |F,1/2>
    const PrecessionSetup setup =
        PrecessionSetup::make(basis_state(f, start, Axis::x), kGenericPhase);
    const UncertaintyReport report = sequential_uncertainties(setup);
    const double two_f = static_cast<double>(twice_f);
    rows.push_back(ScalingRow{twice_f, 1.0 / std::sqrt(two_f), report.combined, 1.0 / two_f});
  }
  return rows;
}

}  // namespace sublevel_sense
