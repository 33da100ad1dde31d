#include "sublevel_sense/transverse.hpp"

#include <cmath>

namespace sublevel_sense {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
}

TiltedFieldSetup TiltedFieldSetup::make(StateVector initial, double gamma,
                                        TransverseAzimuth azimuth, double phase) {
  if (initial.basis_axis != Axis::x) {
    throw std::invalid_argument("TiltedFieldSetup: initial state must be declared in the x basis");
  }
  if (!(gamma >= 0.0 && gamma < kPi / 2.0)) {
    throw std::invalid_argument("TiltedFieldSetup: gamma must lie in [0, pi/2)");
  }
  SpinF f = initial.f;
  return TiltedFieldSetup{f, std::move(initial), gamma, azimuth, phase};
}

double beta_from_phi(double phi, double gamma) {
  const double s = std::sin(phi / 2.0) * std::cos(gamma);
  return 2.0 * std::asin(std::min(1.0, std::max(-1.0, s)));
}

SublevelProbabilities tilted_precession(const TiltedFieldSetup& setup) {
  const SpinF f = setup.f;
  const std::size_t n = f.dimension();

  // Generator of the rotation: n . F for the unit field axis
  // n = (sin g, 0, cos g) or (0, sin g, cos g), in the z basis.
  ComplexMatrix axis_op =
      setup.azimuth == TransverseAzimuth::x ? operator_fx(f) : operator_fy(f);
  axis_op *= std::sin(setup.gamma);
  ComplexMatrix fz = operator_fz(f);
  fz *= std::cos(setup.gamma);
  axis_op += fz;

  const EigenDecomposition eig = eigh(axis_op);
  const std::vector<Complex> z0 = state_in_z_basis(setup.initial);

  // Coefficients in the generator eigenbasis evolve as e^{-i phi lambda}.
  std::vector<Complex> coeffs(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{};
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(eig.eigenvectors(i, k)) * z0[i];
    coeffs[k] = acc;
  }
  std::vector<Complex> evolved(n), d_evolved(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = -setup.phase * eig.eigenvalues[k];
    const Complex rotated = coeffs[k] * Complex{std::cos(angle), std::sin(angle)};
    const Complex d_rotated = rotated * Complex{0.0, -eig.eigenvalues[k]};
    for (std::size_t i = 0; i < n; ++i) {
      evolved[i] += eig.eigenvectors(i, k) * rotated;
      d_evolved[i] += eig.eigenvectors(i, k) * d_rotated;
    }
  }

  // Measure in the x basis: amplitudes a = d(pi/2)^T b.
  const RealMatrix& d_half = wigner_half_pi(f);
  const std::vector<Complex> a = d_half.transpose_times(evolved);
  const std::vector<Complex> da = d_half.transpose_times(d_evolved);

  SublevelProbabilities out;
  out.p.resize(n);
  out.dp_dphi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::norm(a[i]);
    if (p < -1e-12 || p > 1.0 + 1e-12) {
      throw NumericalError("tilted_precession: probability escaped [0,1]");
    }
    out.p[i] = std::min(1.0, std::max(0.0, p));
    out.dp_dphi[i] = 2.0 * (std::conj(a[i]) * da[i]).real();
  }
  return out;
}

}  // namespace sublevel_sense
