#include "sublevel_sense/observables.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace sublevel_sense {

bool is_even_sublevel(SublevelIndex m) {
  const int mod = ((m.twice_m % 4) + 4) % 4;
  return mod == 0 || mod == 1;
}

ParityObservable make_parity_observable(SpinF f) {
  const std::size_t n = f.dimension();
  ComplexMatrix p(n);
  const double parity_sign = (f.twice_f / 2) % 2 == 0 ? 1.0 : -1.0;  // (-1)^floor(F)
  for (std::size_t i = 0; i < n; ++i) {
    p(i, i) += 0.5;
    // |-m><m| sits on the anti-diagonal under the +F..-F ordering.
    p(n - 1 - i, i) += 0.5 * parity_sign;
  }
  return ParityObservable{f, std::move(p)};
}

ValueSlope even_parity_probability(const PrecessionSetup& setup) {
  const SublevelProbabilities probs = sublevel_probabilities(setup);
  double value = 0.0, slope = 0.0;
  for (std::size_t i = 0; i < probs.p.size(); ++i) {
    if (is_even_sublevel(sublevel_at(setup.f, i))) {
      value += probs.p[i];
      slope += probs.dp_dphi[i];
    }
  }
  return ValueSlope{value, slope};
}

namespace {

double parity_expectation(const ParityObservable& parity, std::span<const Complex> z_amps) {
  const std::vector<Complex> pz = parity.z_form * z_amps;
  Complex acc{};
  for (std::size_t i = 0; i < z_amps.size(); ++i) acc += std::conj(z_amps[i]) * pz[i];
  return acc.real();
}

ComplexMatrix fz_power(SpinF f, int power) {
  ComplexMatrix m(f.dimension());
  for (std::size_t i = 0; i < f.dimension(); ++i) {
    m(i, i) = std::pow(sublevel_at(f, i).value(), power);
  }
  return m;
}

// Dense linear solve with partial pivoting; the weight systems are tiny.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-14) {
      throw NumericalError("harmonic_weights: cancellation system is singular");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return x;
}

}  // namespace

double quadratic_insensitivity_check(SpinF f, double duration_s, double omega_hz,
                                     std::span<const double> fz_power_coeffs,
                                     std::span<const StateVector> z_basis_states,
                                     std::size_t time_samples) {
  if (duration_s <= 0.0) throw std::invalid_argument("quadratic_insensitivity_check: duration must be positive");
  if (time_samples == 0) throw std::invalid_argument("quadratic_insensitivity_check: need at least one sample");

  ComplexMatrix h0 = operator_fz(f);
  h0 *= omega_hz;
  ComplexMatrix h1 = h0;
  for (std::size_t k = 0; k < fz_power_coeffs.size(); ++k) {
    if (fz_power_coeffs[k] == 0.0) continue;
    ComplexMatrix term = fz_power(f, static_cast<int>(k) + 2);
    term *= fz_power_coeffs[k];
    h1 += term;
  }

  const ParityObservable parity = make_parity_observable(f);
  double worst = 0.0;
  for (const StateVector& state : z_basis_states) {
    if (state.basis_axis != Axis::z) {
      throw std::invalid_argument("quadratic_insensitivity_check: states must be given in the z basis");
    }
    if (!(state.f == f)) throw std::invalid_argument("quadratic_insensitivity_check: state F mismatch");
    for (std::size_t s = 1; s <= time_samples; ++s) {
      const double t = duration_s * static_cast<double>(s) / static_cast<double>(time_samples);
      const std::vector<Complex> with = evolve(h1, t, std::span<const Complex>(state.amplitudes));
      const std::vector<Complex> without = evolve(h0, t, std::span<const Complex>(state.amplitudes));
      const double deviation = std::abs(parity_expectation(parity, with) - parity_expectation(parity, without));
      worst = std::max(worst, deviation);
    }
  }
  return worst;
}

std::vector<double> cosine_coefficients(const std::function<double(double)>& signal,
                                        std::size_t max_harmonic, std::size_t n_samples) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::vector<double> sums(max_harmonic + 1, 0.0);
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(n_samples);
    const double v = signal(phi);
    sums[0] += v;
    for (std::size_t k = 1; k <= max_harmonic; ++k) sums[k] += v * std::cos(static_cast<double>(k) * phi);
  }
  sums[0] /= static_cast<double>(n_samples);
  for (std::size_t k = 1; k <= max_harmonic; ++k) sums[k] *= 2.0 / static_cast<double>(n_samples);
  return sums;
}

HarmonicWeights harmonic_weights(SpinF f) {
  if (!f.is_integer() || f.twice_f < 2) {
    throw std::invalid_argument("harmonic_weights: defined for integer F >= 1 only");
  }
  const int f_int = f.twice_f / 2;

  const PrecessionEngine engine(basis_state(f, SublevelIndex{0}, Axis::x));

  // cos(2k phi) coefficients of p_m + p_-m (m > 0) and of p_0.
  const std::size_t max_harmonic = static_cast<std::size_t>(f.twice_f);
  std::vector<std::vector<double>> pair_coeffs(static_cast<std::size_t>(f_int) + 1);
  for (int m = 0; m <= f_int; ++m) {
    const std::size_t up = slot_of(f, SublevelIndex{2 * m});
    const std::size_t down = slot_of(f, SublevelIndex{-2 * m});
    pair_coeffs[static_cast<std::size_t>(m)] = cosine_coefficients(
        [&](double phi) {
          const SublevelProbabilities probs = engine.probabilities_at(phi);
          return m == 0 ? probs.p[up] : probs.p[up] + probs.p[down];
        },
        max_harmonic);
  }

  HarmonicWeights weights{f, std::vector<double>(static_cast<std::size_t>(f_int) + 1, 0.0)};
  weights.alpha[0] = 1.0;  // gauge: alpha_0 = 1 and, where feasible, alpha_F = 0
  if (f_int == 1) return weights;

  const std::size_t conditions = static_cast<std::size_t>(f_int) - 1;  // k = 1..F-1
  std::vector<std::vector<double>> a(conditions, std::vector<double>(conditions, 0.0));
  std::vector<double> rhs(conditions, 0.0);
  for (std::size_t k = 1; k <= conditions; ++k) {
    for (std::size_t m = 1; m <= conditions; ++m) a[k - 1][m - 1] = pair_coeffs[m][2 * k];
    rhs[k - 1] = -pair_coeffs[0][2 * k];
  }
  try {
    const std::vector<double> solution = solve_linear(std::move(a), std::move(rhs));
    for (std::size_t m = 1; m <= conditions; ++m) weights.alpha[m] = solution[m - 1];
    return weights;
  } catch (const NumericalError&) {
    // The alpha_F = 0 gauge has no solution (F = 2: the |m| = 1 pair carries
    // no second harmonic, so the cancellation must fall on alpha_F).  Solve
    // the underdetermined system over alpha_1..alpha_F by least norm instead.
  }
  const std::size_t unknowns = static_cast<std::size_t>(f_int);  // alpha_1..alpha_F
  std::vector<std::vector<double>> full(conditions, std::vector<double>(unknowns, 0.0));
  std::vector<double> b(conditions, 0.0);
  for (std::size_t k = 1; k <= conditions; ++k) {
    for (std::size_t m = 1; m <= unknowns; ++m) full[k - 1][m - 1] = pair_coeffs[m][2 * k];
    b[k - 1] = -pair_coeffs[0][2 * k];
  }
  // x = A^T (A A^T)^{-1} b
  std::vector<std::vector<double>> gram(conditions, std::vector<double>(conditions, 0.0));
  for (std::size_t i = 0; i < conditions; ++i)
    for (std::size_t j = 0; j < conditions; ++j)
      for (std::size_t m = 0; m < unknowns; ++m) gram[i][j] += full[i][m] * full[j][m];
  const std::vector<double> y = solve_linear(std::move(gram), std::move(b));
  for (std::size_t m = 0; m < unknowns; ++m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < conditions; ++k) acc += full[k][m] * y[k];
    weights.alpha[m + 1] = acc;
  }
  return weights;
}

ValueSlope harmonic_signal(const PrecessionSetup& setup, const HarmonicWeights& weights) {
  if (!(weights.f == setup.f)) throw std::invalid_argument("harmonic_signal: weights built for a different F");
  const SublevelProbabilities probs = sublevel_probabilities(setup);
  double value = 0.0, slope = 0.0;
  for (std::size_t i = 0; i < probs.p.size(); ++i) {
    const int abs_m = std::abs(sublevel_at(setup.f, i).twice_m) / 2;
    const double alpha = weights.alpha[static_cast<std::size_t>(abs_m)];
    value += alpha * probs.p[i];
    slope += alpha * probs.dp_dphi[i];
  }
  return ValueSlope{value, slope};
}

}  // namespace sublevel_sense
