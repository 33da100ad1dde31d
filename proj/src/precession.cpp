#include "sublevel_sense/precession.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sublevel_sense {

PrecessionSetup PrecessionSetup::make(StateVector initial, double phase) {
  if (initial.basis_axis != Axis::x) {
    throw std::invalid_argument("PrecessionSetup: initial state must be declared in the x basis");
  }
  SpinF f = initial.f;
  return PrecessionSetup{f, std::move(initial), phase};
}

PrecessionEngine::PrecessionEngine(StateVector initial)
    : f_(initial.f), d_half_pi_(&wigner_half_pi(initial.f)) {
  if (initial.basis_axis != Axis::x) {
    throw std::invalid_argument("PrecessionEngine: initial state must be declared in the x basis");
  }
  z_amps_ = state_in_z_basis(initial);
}

void PrecessionEngine::amplitudes_at(double phi, std::vector<Complex>& a, std::vector<Complex>& da) const {
  const std::size_t n = f_.dimension();
  std::vector<Complex> b(n), db(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = sublevel_at(f_, i).value();
    const Complex rot{std::cos(m * phi), -std::sin(m * phi)};  // e^{-i m phi}
    b[i] = z_amps_[i] * rot;
    db[i] = b[i] * Complex{0.0, -m};
  }
  // Back to the measurement (x) basis: a = d^T b.
  a = d_half_pi_->transpose_times(b);
  da = d_half_pi_->transpose_times(db);
}

SublevelProbabilities PrecessionEngine::probabilities_at(double phi) const {
  std::vector<Complex> a, da;
  amplitudes_at(phi, a, da);
  const std::size_t n = a.size();
  SublevelProbabilities out;
  out.p.resize(n);
  out.dp_dphi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p = std::norm(a[i]);
    if (p < -1e-12 || p > 1.0 + 1e-12) {
      throw NumericalError("sublevel_probabilities: probability escaped [0,1]: " + std::to_string(p));
    }
    out.p[i] = std::min(1.0, std::max(0.0, p));
    out.dp_dphi[i] = 2.0 * (std::conj(a[i]) * da[i]).real();
  }
  return out;
}

SublevelProbabilities sublevel_probabilities(const PrecessionSetup& setup) {
  return PrecessionEngine(setup.initial).probabilities_at(setup.phase);
}

FxExpectation expectation_fx(const PrecessionSetup& setup) {
  const SublevelProbabilities probs = sublevel_probabilities(setup);
  const SpinF f = setup.f;
  double mean = 0.0, second = 0.0, slope = 0.0;
  for (std::size_t i = 0; i < probs.p.size(); ++i) {
    const double m = sublevel_at(f, i).value();
    mean += m * probs.p[i];
    second += m * m * probs.p[i];
    slope += m * probs.dp_dphi[i];
  }
  return FxExpectation{mean, second - mean * mean, slope};
}

double single_level_uncertainty(const PrecessionSetup& setup, SublevelIndex m) {
  validate_sublevel(setup.f, m);
  const SublevelProbabilities probs = sublevel_probabilities(setup);
  const std::size_t slot = slot_of(setup.f, m);
  const double slope = probs.dp_dphi[slot];
  if (std::abs(slope) < kSlopeEpsilon) return std::numeric_limits<double>::infinity();
  // 1 - p as the sum of the other probabilities: no cancellation when p ~ 1.
  double complement = 0.0;
  for (std::size_t i = 0; i < probs.p.size(); ++i) {
    if (i != slot) complement += probs.p[i];
  }
  return std::sqrt(std::max(0.0, probs.p[slot] * complement)) / std::abs(slope);
}

double uncertainty_from(double variance, double slope) {
  if (std::abs(slope) < kSlopeEpsilon) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::max(0.0, variance)) / std::abs(slope);
}

double inverse_or_zero(double delta_phi) {
  if (!std::isfinite(delta_phi)) return 0.0;
  return 1.0 / delta_phi;
}

}  // namespace sublevel_sense
