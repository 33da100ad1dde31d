#include "sublevel_sense/spin.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace sublevel_sense {

SpinF SpinF::from_twice(int twice_f) {
  if (twice_f < 1) throw std::invalid_argument("SpinF: 2F must be >= 1, got " + std::to_string(twice_f));
  return SpinF{twice_f};
}

std::vector<SublevelIndex> all_sublevels(SpinF f) {
  std::vector<SublevelIndex> out;
  out.reserve(f.dimension());
  for (std::size_t i = 0; i < f.dimension(); ++i) out.push_back(sublevel_at(f, i));
  return out;
}

void validate_sublevel(SpinF f, SublevelIndex m) {
  if (std::abs(m.twice_m) > f.twice_f || (m.twice_m - f.twice_f) % 2 != 0) {
    throw std::invalid_argument("SublevelIndex: 2m=" + std::to_string(m.twice_m) +
                                " invalid for 2F=" + std::to_string(f.twice_f));
  }
}

StateVector StateVector::from_amplitudes(SpinF f, Axis axis, std::vector<Complex> amplitudes) {
  if (amplitudes.size() != f.dimension()) {
    throw std::invalid_argument("StateVector: expected " + std::to_string(f.dimension()) +
                                " amplitudes, got " + std::to_string(amplitudes.size()));
  }
  StateVector s{f, axis, std::move(amplitudes)};
  if (std::abs(s.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("StateVector: amplitudes not normalized (norm " +
                                std::to_string(s.norm()) + ")");
  }
  return s;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

ComplexMatrix operator_fz(SpinF f) {
  ComplexMatrix m(f.dimension());
  for (std::size_t i = 0; i < f.dimension(); ++i) m(i, i) = sublevel_at(f, i).value();
  return m;
}

namespace {

// sqrt(F(F+1) - m(m+1)) with everything kept in twice-integers until the end.
double ladder_element(SpinF f, int twice_m_lower) {
  const double ff = f.value() * (f.value() + 1.0);
  const double m = twice_m_lower / 2.0;
  return std::sqrt(ff - m * (m + 1.0));
}

}  // namespace

ComplexMatrix operator_fx(SpinF f) {
  ComplexMatrix m(f.dimension());
  for (std::size_t i = 0; i + 1 < f.dimension(); ++i) {
    // slot i holds m_i, slot i+1 holds m_i - 1; F+ connects them.
    const double e = 0.5 * ladder_element(f, sublevel_at(f, i + 1).twice_m);
    m(i, i + 1) = e;
    m(i + 1, i) = e;
  }
  return m;
}

ComplexMatrix operator_fy(SpinF f) {
  ComplexMatrix m(f.dimension());
  for (std::size_t i = 0; i + 1 < f.dimension(); ++i) {
    const double e = 0.5 * ladder_element(f, sublevel_at(f, i + 1).twice_m);
    m(i, i + 1) = Complex{0.0, -e};
    m(i + 1, i) = Complex{0.0, e};
  }
  return m;
}

namespace {

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// d^F_{m'm}(beta) by the explicit Wigner sum.  Arguments are twice-values;
// factorial arguments below are all plain integers.
double wigner_entry(int twice_f, int twice_mp, int twice_m, double cos_half, double sin_half) {
  const int f_plus_m = (twice_f + twice_m) / 2;
  const int f_minus_m = (twice_f - twice_m) / 2;
  const int f_plus_mp = (twice_f + twice_mp) / 2;
  const int f_minus_mp = (twice_f - twice_mp) / 2;
  const int mp_minus_m = (twice_mp - twice_m) / 2;

  const int s_min = std::max(0, -mp_minus_m);
  const int s_max = std::min(f_minus_mp, f_plus_m);
  if (s_min > s_max) return 0.0;

  const double log_pref = 0.5 * (log_factorial(f_plus_m) + log_factorial(f_minus_m) +
                                 log_factorial(f_plus_mp) + log_factorial(f_minus_mp));

  // Sum smallest-magnitude terms first to limit cancellation error.
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(s_max - s_min) + 1);
  for (int s = s_min; s <= s_max; ++s) {
    const int p_cos = twice_f - mp_minus_m - 2 * s;
    const int p_sin = mp_minus_m + 2 * s;
    const double log_den = log_factorial(s) + log_factorial(f_minus_mp - s) +
                           log_factorial(f_plus_m - s) + log_factorial(mp_minus_m + s);
    const double magnitude = std::exp(log_pref - log_den) * std::pow(cos_half, p_cos) * std::pow(sin_half, p_sin);
    const double sign = ((mp_minus_m + s) % 2 == 0) ? 1.0 : -1.0;
    terms.push_back(sign * magnitude);
  }
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  double sum = 0.0;
  for (const double t : terms) sum += t;
  return sum;
}

}  // namespace

RealMatrix wigner_small_d(SpinF f, double beta) {
  const std::size_t n = f.dimension();
  RealMatrix d(n);
  const double cos_half = std::cos(beta / 2.0);
  const double sin_half = std::sin(beta / 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int twice_mp = sublevel_at(f, i).twice_m;
    for (std::size_t j = 0; j < n; ++j) {
      const int twice_m = sublevel_at(f, j).twice_m;
      d(i, j) = wigner_entry(f.twice_f, twice_mp, twice_m, cos_half, sin_half);
    }
  }
  return d;
}

const RealMatrix& wigner_half_pi(SpinF f) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<RealMatrix>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[f.twice_f];
  if (!slot) {
    constexpr double kHalfPi = 1.5707963267948966192313216916398;
    slot = std::make_unique<RealMatrix>(wigner_small_d(f, kHalfPi));
  }
  return *slot;
}

StateVector basis_state(SpinF f, SublevelIndex m, Axis axis) {
  validate_sublevel(f, m);
  std::vector<Complex> amps(f.dimension(), Complex{});
  amps[slot_of(f, m)] = 1.0;
  return StateVector{f, axis, std::move(amps)};
}

std::vector<Complex> state_in_z_basis(const StateVector& state) {
  if (state.basis_axis == Axis::z) return state.amplitudes;
  // |m>_x = sum_m' d_{m'm}(pi/2) |m'>_z, so z coordinates are d * c.
  return wigner_half_pi(state.f) * std::span<const Complex>(state.amplitudes);
}

StateVector evolve(const ComplexMatrix& h_hz, double t_s, const StateVector& psi) {
  std::vector<Complex> out = evolve(h_hz, t_s, std::span<const Complex>(psi.amplitudes));
  return StateVector{psi.f, psi.basis_axis, std::move(out)};
}

}  // namespace sublevel_sense
