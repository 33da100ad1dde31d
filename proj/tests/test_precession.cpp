#include <cmath>
#include <limits>

#include "doctest.h"
#include "sublevel_sense/precession.hpp"

using namespace sublevel_sense;

namespace {

constexpr double kPi = 3.14159265358979323846;

PrecessionSetup stretched_f3(double phase) {
  return PrecessionSetup::make(basis_state(SpinF::integer(3), SublevelIndex{6}, Axis::x), phase);
}

PrecessionSetup center_f3(double phase) {
  return PrecessionSetup::make(basis_state(SpinF::integer(3), SublevelIndex{0}, Axis::x), phase);
}

}  // namespace

TEST_CASE("sublevel_probabilities: no precession leaves the prepared level") {
  const SublevelProbabilities probs = sublevel_probabilities(stretched_f3(0.0));
  CHECK(probs.p[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < probs.p.size(); ++i) CHECK(probs.p[i] < 1e-12);
}

TEST_CASE("sublevel_probabilities: +-m symmetry for the |3,0>_x start") {
  for (double phi = 0.05; phi < 2.0 * kPi; phi += 0.21) {
    const SublevelProbabilities probs = sublevel_probabilities(center_f3(phi));
    for (std::size_t i = 0; i < probs.p.size(); ++i) {
      CHECK(probs.p[i] == doctest::Approx(probs.p[probs.p.size() - 1 - i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("sublevel_probabilities: matches the numeric evolution oracle at phi = pi/4") {
  const double phi = kPi / 4.0;
  const SublevelProbabilities probs = sublevel_probabilities(center_f3(phi));

  // Independent path: evolve the z amplitudes under H = F_z for t = phi/2pi,
  // rotate into the x basis and square.
  const SpinF f = SpinF::integer(3);
  const std::vector<Complex> z0 = state_in_z_basis(basis_state(f, SublevelIndex{0}, Axis::x));
  const std::vector<Complex> zt = evolve(operator_fz(f), phi / (2.0 * kPi), z0);
  const std::vector<Complex> xt = wigner_half_pi(f).transpose_times(zt);
  for (std::size_t i = 0; i < probs.p.size(); ++i) {
    CHECK(probs.p[i] == doctest::Approx(std::norm(xt[i])).epsilon(1e-10));
  }
}

TEST_CASE("sublevel_probabilities: probabilities sum to one, slopes sum to zero") {
  for (double phi : {0.13, 0.9, 2.2, 4.7}) {
    for (int twice_f : {1, 3, 6}) {
      const SpinF f{twice_f};
      const SublevelProbabilities probs = sublevel_probabilities(
          PrecessionSetup::make(basis_state(f, SublevelIndex{twice_f % 2}, Axis::x), phi));
      double sum_p = 0.0, sum_dp = 0.0;
      for (std::size_t i = 0; i < probs.p.size(); ++i) {
        CHECK(probs.p[i] >= 0.0);
        CHECK(probs.p[i] <= 1.0);
        sum_p += probs.p[i];
        sum_dp += probs.dp_dphi[i];
      }
      CHECK(sum_p == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::abs(sum_dp) < 1e-10);
    }
  }
}

TEST_CASE("sublevel_probabilities: analytic slopes match central finite differences") {
  const PrecessionEngine engine(basis_state(SpinF::integer(3), SublevelIndex{0}, Axis::x));
  const double h = 1e-6;
  for (double phi = 0.1; phi < kPi; phi += 0.1) {
    const SublevelProbabilities probs = engine.probabilities_at(phi);
    const SublevelProbabilities lo = engine.probabilities_at(phi - h);
    const SublevelProbabilities hi = engine.probabilities_at(phi + h);
    for (std::size_t i = 0; i < probs.p.size(); ++i) {
      const double fd = (hi.p[i] - lo.p[i]) / (2.0 * h);
      CHECK(probs.dp_dphi[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("sublevel_probabilities: pi-periodicity of the |F,0> start for integer F") {
  for (int f_int : {1, 2, 3}) {
    const PrecessionEngine engine(
        basis_state(SpinF::integer(f_int), SublevelIndex{0}, Axis::x));
    for (double phi = 0.0; phi < kPi; phi += 0.37) {
      const SublevelProbabilities a = engine.probabilities_at(phi);
      const SublevelProbabilities b = engine.probabilities_at(phi + kPi);
      for (std::size_t i = 0; i < a.p.size(); ++i) {
        CHECK(std::abs(a.p[i] - b.p[i]) < 1e-10);
      }
    }
  }
}

TEST_CASE("expectation_fx: stretched start pins the mean at F with zero variance") {
  const FxExpectation fx = expectation_fx(stretched_f3(0.0));
  CHECK(fx.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(fx.variance) < 1e-10);
}

TEST_CASE("expectation_fx: m=0 start keeps <Fx> at zero for all phases") {
  for (double phi = 0.0; phi < 2.0 * kPi; phi += 0.17) {
    const FxExpectation fx = expectation_fx(center_f3(phi));
    CHECK(std::abs(fx.value) < 1e-12);
  }
}

TEST_CASE("expectation_fx: stretched F=3 uncertainty is 1/sqrt(6) at generic phases") {
  const double expected = 1.0 / std::sqrt(6.0);
  for (double phi : {0.3, 0.8, 1.4, 2.0, 2.8}) {
    const FxExpectation fx = expectation_fx(stretched_f3(phi));
    CHECK(uncertainty_from(fx.variance, fx.d_value_dphi) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("single_level_uncertainty: best m=0 sensitivity is half the Larmor uncertainty") {
  // Scan one period densely; the best value should approach 1/(2 sqrt(6)).
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 20000; ++i) {
    const double phi = kPi * i / 20000.0;
    best = std::min(best, single_level_uncertainty(center_f3(phi), SublevelIndex{0}));
  }
  CHECK(best == doctest::Approx(0.5 / std::sqrt(6.0)).epsilon(1e-5));
  CHECK(best == doctest::Approx(0.20412).epsilon(1e-4));
}

TEST_CASE("single_level_uncertainty: zero slope at phi = 0 yields the infinity sentinel") {
  const double u = single_level_uncertainty(stretched_f3(0.0), SublevelIndex{6});
  CHECK(!std::isfinite(u));
  CHECK(inverse_or_zero(u) == 0.0);
}

TEST_CASE("single_level_uncertainty: stretched F=3 never beats the <Fx> bound") {
  const double bound = 1.0 / std::sqrt(6.0) - 1e-9;
  for (int i = 1; i < 2000; ++i) {
    const double phi = kPi * i / 2000.0;
    const PrecessionSetup setup = stretched_f3(phi);
    for (int twice_m = -6; twice_m <= 6; twice_m += 2) {
      CHECK(single_level_uncertainty(setup, SublevelIndex{twice_m}) >= bound);
    }
  }
}

TEST_CASE("PrecessionSetup: rejects z-basis initial states") {
  CHECK_THROWS_AS(
      PrecessionSetup::make(basis_state(SpinF::integer(3), SublevelIndex{0}, Axis::z), 0.0),
      std::invalid_argument);
}
