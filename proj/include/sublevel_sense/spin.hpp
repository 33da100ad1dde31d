#pragma once

#include <span>
#include <vector>

#include "sublevel_sense/numerics.hpp"

namespace sublevel_sense {

/// Total angular momentum quantum number, stored as 2F so half-integers stay
/// exact.  dimension() == 2F+1.
struct SpinF {
  int twice_f = 1;

  static SpinF from_twice(int twice_f);
  static SpinF integer(int f) { return from_twice(2 * f); }

  std::size_t dimension() const { return static_cast<std::size_t>(twice_f) + 1; }
  bool is_integer() const { return twice_f % 2 == 0; }
  double value() const { return twice_f / 2.0; }

  friend bool operator==(SpinF a, SpinF b) { return a.twice_f == b.twice_f; }
};

/// Magnetic quantum number m, stored as 2m; must share the parity of 2F.
struct SublevelIndex {
  int twice_m = 0;

  double value() const { return twice_m / 2.0; }
  friend bool operator==(SublevelIndex a, SublevelIndex b) { return a.twice_m == b.twice_m; }
};

// Index convention, fixed repo-wide: slot i holds m = F - i, i.e. m runs
// descending from +F to -F.  These two helpers are the only place the
// convention lives.
inline SublevelIndex sublevel_at(SpinF f, std::size_t index) {
  return SublevelIndex{f.twice_f - 2 * static_cast<int>(index)};
}
inline std::size_t slot_of(SpinF f, SublevelIndex m) {
  return static_cast<std::size_t>(f.twice_f - m.twice_m) / 2;
}

/// All 2F+1 sublevels, +F first.
std::vector<SublevelIndex> all_sublevels(SpinF f);

/// Throws unless |m| <= F with matching parity.
void validate_sublevel(SpinF f, SublevelIndex m);

enum class Axis { x, z };

/// Complex amplitudes over the 2F+1 sublevels in a declared quantization
/// basis, indexed by m descending from +F.  Normalized within 1e-10.
struct StateVector {
  SpinF f;
  Axis basis_axis = Axis::z;
  std::vector<Complex> amplitudes;

  static StateVector from_amplitudes(SpinF f, Axis axis, std::vector<Complex> amplitudes);

  double norm() const;
};

/// F_z: diagonal with entries m, ordered +F..-F.  Dimensionless; scale by a
/// frequency to make a Hamiltonian in Hz.
ComplexMatrix operator_fz(SpinF f);

/// F_x and F_y from the ladder construction
/// <m±1|F±|m> = sqrt(F(F+1) - m(m±1)).
ComplexMatrix operator_fx(SpinF f);
ComplexMatrix operator_fy(SpinF f);

/// Wigner small-d matrix d^F_{m'm}(beta), indexed (m', m) descending from +F.
/// Real and orthogonal; evaluated through log-factorials so F up to ~30 is
/// safe from overflow.
RealMatrix wigner_small_d(SpinF f, double beta);

/// Cached d^F(pi/2), the passive rotation between the z and x bases.
/// Safe for concurrent readers.
const RealMatrix& wigner_half_pi(SpinF f);

/// The eigenstate |F,m> of F_axis, written in its own basis: a unit
/// coordinate vector with basis_axis = axis.  Expand onto z with
/// state_in_z_basis; for axis x that yields column m of wigner_small_d(F, pi/2).
StateVector basis_state(SpinF f, SublevelIndex m, Axis axis);

/// z-basis amplitudes of a state declared in the x (or z) basis.
std::vector<Complex> state_in_z_basis(const StateVector& state);

/// Convenience wrapper over the amplitude-level evolve: H and the state must
/// be expressed in the same basis.
StateVector evolve(const ComplexMatrix& h_hz, double t_s, const StateVector& psi);

}  // namespace sublevel_sense
