#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sublevel_sense/precession.hpp"

namespace sublevel_sense {

/// m counts as "even" when m is an even integer, or, for half-integer F,
/// when m - 1/2 is even (the even+1/2 convention).  Equivalently
/// 2m mod 4 is 0 or 1.
bool is_even_sublevel(SublevelIndex m);

/// Projector onto the even sublevels of the x basis, written in the z basis:
/// P = 1/2 + (1/2) (-1)^floor(F) * sum_m |-m><m|.  A projector with trace
/// equal to the number of even sublevels.
struct ParityObservable {
  SpinF f;
  ComplexMatrix z_form;
};

ParityObservable make_parity_observable(SpinF f);

struct ValueSlope {
  double value;
  double slope;  // per radian
};

/// Total probability in the even sublevels with analytic phase slope; equals
/// the quadratic form of z_form on the evolved z-basis state.
ValueSlope even_parity_probability(const PrecessionSetup& setup);

/// Evolves each state under H0 = omega*F_z and under H0 plus the given
/// powers of F_z (fz_power_coeffs[k] multiplies F_z^{k+2}, in Hz), sampling
/// time_samples points in (0, duration], and returns the largest difference
/// in <P_even>.  Even powers must leave the parity fringe untouched; odd
/// powers generically do not.
double quadratic_insensitivity_check(SpinF f, double duration_s, double omega_hz,
                                     std::span<const double> fz_power_coeffs,
                                     std::span<const StateVector> z_basis_states,
                                     std::size_t time_samples = 16);

/// Weights alpha_|m| (symmetric in m, alpha_0 = 1, alpha_F = 0) that cancel
/// every harmonic of sum_m alpha_m p_m(phi) between DC and cos(2F phi) for
/// precession from |F,0>_x.
struct HarmonicWeights {
  SpinF f;                    // integer F
  std::vector<double> alpha;  // indexed by |m| = 0..F
};

/// Solves the (F-1)-dimensional linear system that zeroes the cos(2k phi)
/// Fourier coefficients for k = 1..F-1.  Coefficients are measured by
/// trapezoidal quadrature, 4096 samples per period; the analytic
/// amplitude-product expansion is kept as a test oracle.
HarmonicWeights harmonic_weights(SpinF f);

/// The weighted signal sum_m alpha_m p_m and its analytic slope.
ValueSlope harmonic_signal(const PrecessionSetup& setup, const HarmonicWeights& weights);

/// Cosine-series coefficients of a 2*pi-periodic sampled signal:
/// out[k] = coefficient of cos(k*phi) for k = 0..max_harmonic, by
/// trapezoidal quadrature on a uniform grid of n_samples points.
std::vector<double> cosine_coefficients(const std::function<double(double)>& signal,
                                        std::size_t max_harmonic, std::size_t n_samples = 4096);

}  // namespace sublevel_sense
