#include <cmath>
#include <random>

#include "doctest.h"
#include "sublevel_sense/observables.hpp"
#include "test_util.hpp"

using namespace sublevel_sense;

namespace {

constexpr double kPi = 3.14159265358979323846;

PrecessionSetup center_start(SpinF f, double phase) {
  return PrecessionSetup::make(basis_state(f, SublevelIndex{f.is_integer() ? 0 : 1}, Axis::x), phase);
}

double parity_quadratic_form(const ParityObservable& parity, std::span<const Complex> z) {
  const std::vector<Complex> pz = parity.z_form * z;
  Complex acc{};
  for (std::size_t i = 0; i < z.size(); ++i) acc += std::conj(z[i]) * pz[i];
  return acc.real();
}

// Direct construction of the projector from x-basis outer products; kept
// independent of the closed z form it validates.
ComplexMatrix parity_from_outer_products(SpinF f) {
  ComplexMatrix p(f.dimension());
  for (std::size_t i = 0; i < f.dimension(); ++i) {
    const SublevelIndex m = sublevel_at(f, i);
    if (!is_even_sublevel(m)) continue;
    const std::vector<Complex> z = state_in_z_basis(basis_state(f, m, Axis::x));
    for (std::size_t r = 0; r < z.size(); ++r)
      for (std::size_t c = 0; c < z.size(); ++c) p(r, c) += z[r] * std::conj(z[c]);
  }
  return p;
}

}  // namespace

TEST_CASE("is_even_sublevel: integer and even+1/2 conventions") {
  CHECK(is_even_sublevel(SublevelIndex{0}));
  CHECK(!is_even_sublevel(SublevelIndex{2}));
  CHECK(is_even_sublevel(SublevelIndex{4}));
  CHECK(is_even_sublevel(SublevelIndex{-4}));
  CHECK(is_even_sublevel(SublevelIndex{1}));    // m = 1/2
  CHECK(!is_even_sublevel(SublevelIndex{-1}));  // m = -1/2
  CHECK(is_even_sublevel(SublevelIndex{-3}));   // m = -3/2
  CHECK(!is_even_sublevel(SublevelIndex{3}));   // m = 3/2
  CHECK(is_even_sublevel(SublevelIndex{5}));    // m = 5/2
}

TEST_CASE("make_parity_observable: closed form equals the outer-product construction") {
  for (int twice_f : {2, 6, 7, 1}) {
    const SpinF f{twice_f};
    const ParityObservable parity = make_parity_observable(f);
    const ComplexMatrix direct = parity_from_outer_products(f);
    for (std::size_t i = 0; i < direct.dim(); ++i)
      for (std::size_t j = 0; j < direct.dim(); ++j)
        CHECK(std::abs(parity.z_form(i, j) - direct(i, j)) < 1e-12);
  }
}

TEST_CASE("make_parity_observable: projector identity, spectrum, and trace") {
  for (int twice_f : {6, 7}) {
    const SpinF f{twice_f};
    const ParityObservable parity = make_parity_observable(f);
    const ComplexMatrix p2 = parity.z_form * parity.z_form;
    for (std::size_t i = 0; i < p2.dim(); ++i)
      for (std::size_t j = 0; j < p2.dim(); ++j)
        CHECK(std::abs(p2(i, j) - parity.z_form(i, j)) < 1e-12);

    const EigenDecomposition eig = eigh(parity.z_form);
    int even_count = 0;
    for (const SublevelIndex m : all_sublevels(f)) even_count += is_even_sublevel(m) ? 1 : 0;
    double trace = 0.0;
    for (const double lambda : eig.eigenvalues) {
      CHECK((std::abs(lambda) < 1e-12 || std::abs(lambda - 1.0) < 1e-12));
      trace += lambda;
    }
    CHECK(trace == doctest::Approx(even_count).epsilon(1e-12));
  }
}

TEST_CASE("even_parity_probability: |3,0>_x starts fully even") {
  const ValueSlope v = even_parity_probability(center_start(SpinF::integer(3), 0.0));
  CHECK(v.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("even_parity_probability: direct sum agrees with the z-form quadratic form") {
  std::mt19937_64 rng(31);
  for (int twice_f : {6, 7}) {
    const SpinF f{twice_f};
    const ParityObservable parity = make_parity_observable(f);
    for (int rep = 0; rep < 50; ++rep) {
      const StateVector state = test_util::random_state(f, Axis::x, rng);
      const double phi = 2.0 * kPi * (rep + 1) / 53.0;
      const ValueSlope direct = even_parity_probability(PrecessionSetup::make(state, phi));

      PrecessionEngine engine(state);
      std::vector<Complex> a, da;
      engine.amplitudes_at(phi, a, da);
      // Rebuild the evolved z-basis state and apply the closed-form projector.
      const std::vector<Complex> z = wigner_half_pi(f) * std::span<const Complex>(a);
      CHECK(direct.value == doctest::Approx(parity_quadratic_form(parity, z)).epsilon(1e-12));
    }
  }
}

TEST_CASE("even_parity_probability: even and odd sums are complementary") {
  const SpinF f = SpinF::integer(3);
  const PrecessionEngine engine(basis_state(f, SublevelIndex{0}, Axis::x));
  for (double phi = 0.0; phi < kPi; phi += 0.11) {
    const SublevelProbabilities probs = engine.probabilities_at(phi);
    double even = 0.0, odd = 0.0;
    for (std::size_t i = 0; i < probs.p.size(); ++i) {
      (is_even_sublevel(sublevel_at(f, i)) ? even : odd) += probs.p[i];
    }
    CHECK(even + odd == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("even_parity_probability: best sensitivity matches the best m=0 sensitivity") {
  const SpinF f = SpinF::integer(3);
  double best_even = 0.0, best_m0 = 0.0;
  for (int i = 1; i < 20000; ++i) {
    const double phi = kPi * i / 20000.0;
    const PrecessionSetup setup = center_start(f, phi);
    const ValueSlope parity = even_parity_probability(setup);
    const double inv_even =
        inverse_or_zero(uncertainty_from(parity.value * (1.0 - parity.value), parity.slope));
    best_even = std::max(best_even, inv_even);
    best_m0 = std::max(best_m0, inverse_or_zero(single_level_uncertainty(setup, SublevelIndex{0})));
  }
  CHECK(best_even == doctest::Approx(best_m0).epsilon(1e-5));
  CHECK(best_even == doctest::Approx(std::sqrt(24.0)).epsilon(1e-5));
}

TEST_CASE("even parity fringe of F=3 has exactly two cosine harmonics") {
  const PrecessionEngine engine(basis_state(SpinF::integer(3), SublevelIndex{0}, Axis::x));
  const auto coeffs = cosine_coefficients(
      [&](double phi) {
        const SublevelProbabilities probs = engine.probabilities_at(phi);
        double even = 0.0;
        for (std::size_t i = 0; i < probs.p.size(); ++i) {
          if (is_even_sublevel(sublevel_at(SpinF::integer(3), i))) even += probs.p[i];
        }
        return even;
      },
      8);
  CHECK(coeffs[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(coeffs[2]) > 0.1);
  CHECK(std::abs(coeffs[6]) > 0.2);
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    if (k == 2 || k == 6) continue;
    CHECK(std::abs(coeffs[k]) < 1e-10);
  }
}

TEST_CASE("quadratic_insensitivity_check: quadratic shifts leave the parity fringe untouched") {
  std::mt19937_64 rng(83);
  for (int twice_f : {6, 7}) {
    const SpinF f{twice_f};
    std::vector<StateVector> states;
    for (int i = 0; i < 8; ++i) states.push_back(test_util::random_state(f, Axis::z, rng));
    const double alpha2[] = {7.3};
    CHECK(quadratic_insensitivity_check(f, 1.0, 1.0, alpha2, states) < 1e-10);
  }
}

TEST_CASE("quadratic_insensitivity_check: zero coefficients give exactly zero deviation") {
  std::mt19937_64 rng(84);
  const SpinF f = SpinF::integer(3);
  std::vector<StateVector> states{test_util::random_state(f, Axis::z, rng)};
  const double none[] = {0.0};
  CHECK(quadratic_insensitivity_check(f, 1.0, 1.0, none, states) == 0.0);
}

TEST_CASE("quadratic_insensitivity_check: odd powers do shift the fringe") {
  std::mt19937_64 rng(85);
  const SpinF f = SpinF::integer(3);
  std::vector<StateVector> states;
  for (int i = 0; i < 8; ++i) states.push_back(test_util::random_state(f, Axis::z, rng));
  const double alpha23[] = {0.0, 0.4};  // cubic only
  CHECK(quadratic_insensitivity_check(f, 1.0, 1.0, alpha23, states) > 1e-3);
}

TEST_CASE("quadratic_insensitivity_check: quartic term also drops out") {
  std::mt19937_64 rng(86);
  const SpinF f = SpinF::integer(3);
  std::vector<StateVector> states;
  for (int i = 0; i < 4; ++i) states.push_back(test_util::random_state(f, Axis::z, rng));
  const double alphas[] = {3.1, 0.0, 1.7};  // quadratic + quartic
  CHECK(quadratic_insensitivity_check(f, 1.0, 1.0, alphas, states) < 1e-10);
}

TEST_CASE("harmonic_weights: F=3 reproduces the published operator weights") {
  const HarmonicWeights w = harmonic_weights(SpinF::integer(3));
  REQUIRE(w.alpha.size() == 4);
  CHECK(w.alpha[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w.alpha[1] == doctest::Approx(-8.0 / 7.0).epsilon(1e-10));
  CHECK(w.alpha[2] == doctest::Approx(11.0 / 7.0).epsilon(1e-10));
  CHECK(std::abs(w.alpha[3]) < 1e-15);
}

TEST_CASE("harmonic_weights: F=1 signal is already a pure second harmonic") {
  const HarmonicWeights w = harmonic_weights(SpinF::integer(1));
  REQUIRE(w.alpha.size() == 2);
  CHECK(w.alpha[0] == 1.0);
  CHECK(w.alpha[1] == 0.0);
  // p_0(phi) = cos^2(phi) for F=1 from the closed-form amplitude path.
  const PrecessionEngine engine(basis_state(SpinF::integer(1), SublevelIndex{0}, Axis::x));
  for (double phi = 0.0; phi < kPi; phi += 0.19) {
    const SublevelProbabilities probs = engine.probabilities_at(phi);
    CHECK(probs.p[1] == doctest::Approx(std::cos(phi) * std::cos(phi)).epsilon(1e-12));
  }
}

TEST_CASE("harmonic_weights: intermediate harmonics cancel below 1e-10 for F = 2..6") {
  for (int f_int = 2; f_int <= 6; ++f_int) {
    const SpinF f = SpinF::integer(f_int);
    const HarmonicWeights w = harmonic_weights(f);
    const PrecessionEngine engine(basis_state(f, SublevelIndex{0}, Axis::x));
    const auto coeffs = cosine_coefficients(
        [&](double phi) {
          const SublevelProbabilities probs = engine.probabilities_at(phi);
          double acc = 0.0;
          for (std::size_t i = 0; i < probs.p.size(); ++i) {
            const int abs_m = std::abs(sublevel_at(f, i).twice_m) / 2;
            acc += w.alpha[abs_m] * probs.p[i];
          }
          return acc;
        },
        static_cast<std::size_t>(2 * f_int));
    for (int k = 1; k < f_int; ++k) CHECK(std::abs(coeffs[2 * k]) < 1e-10);
    CHECK(std::abs(coeffs[2 * f_int]) > 1e-3);  // the surviving top harmonic
  }
}

TEST_CASE("harmonic_signal: F=3 signal fits DC + cos(6 phi) with tiny residual") {
  const SpinF f = SpinF::integer(3);
  const HarmonicWeights w = harmonic_weights(f);
  // Least-squares fit of s(phi) = c0 + c6 cos(6 phi) on a uniform grid is
  // just the two Fourier projections; check the pointwise residual.
  const PrecessionEngine engine(basis_state(f, SublevelIndex{0}, Axis::x));
  const std::size_t n = 1024;
  std::vector<double> signal(n);
  double c0 = 0.0, c6 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = 2.0 * kPi * i / n;
    const SublevelProbabilities probs = engine.probabilities_at(phi);
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.p.size(); ++k) {
      acc += w.alpha[std::abs(sublevel_at(f, k).twice_m) / 2] * probs.p[k];
    }
    signal[i] = acc;
    c0 += acc / n;
    c6 += 2.0 * acc * std::cos(6.0 * phi) / n;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = 2.0 * kPi * i / n;
    CHECK(std::abs(signal[i] - c0 - c6 * std::cos(6.0 * phi)) < 1e-9);
  }
}

TEST_CASE("harmonic_signal: periodic under phi -> phi + pi/F and flat at phi = 0") {
  const SpinF f = SpinF::integer(3);
  const HarmonicWeights w = harmonic_weights(f);
  for (double phi = 0.0; phi < kPi; phi += 0.13) {
    const ValueSlope a = harmonic_signal(
        PrecessionSetup::make(basis_state(f, SublevelIndex{0}, Axis::x), phi), w);
    const ValueSlope b = harmonic_signal(
        PrecessionSetup::make(basis_state(f, SublevelIndex{0}, Axis::x), phi + kPi / 3.0), w);
    CHECK(std::abs(a.value - b.value) < 1e-10);
  }
  const ValueSlope at_zero =
      harmonic_signal(PrecessionSetup::make(basis_state(f, SublevelIndex{0}, Axis::x), 0.0), w);
  CHECK(std::abs(at_zero.slope) < 1e-12);
}

TEST_CASE("harmonic_signal: rejects mismatched F") {
  const HarmonicWeights w = harmonic_weights(SpinF::integer(2));
  CHECK_THROWS_AS(
      harmonic_signal(PrecessionSetup::make(basis_state(SpinF::integer(3), SublevelIndex{0}, Axis::x), 0.1), w),
      std::invalid_argument);
}

TEST_CASE("harmonic_weights: rejects half-integer F") {
  CHECK_THROWS_AS(harmonic_weights(SpinF{7}), std::invalid_argument);
}
