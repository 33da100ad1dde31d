#pragma once

#include <span>
#include <vector>

#include "sublevel_sense/observables.hpp"
#include "sublevel_sense/transverse.hpp"

namespace sublevel_sense {

/// Tensor-Stark + Zeeman scenario.  All energies are frequencies in Hz;
/// stark_e1_hz is the shift of the |m| = 1 levels, so E(m) = stark_e1 * m^2
/// with E(0) = 0.
struct EdmConfig {
  SpinF f = SpinF::integer(3);
  double stark_e1_hz = 5.0;
  double transverse_hz = 10.0;
  TransverseAzimuth transverse_azimuth = TransverseAzimuth::x;
  double bias_hz = 0.0;
  double tau_s = 3.0;

  void validate() const;
};

/// Diagonal tensor-Stark energies stark_e1 * m^2, ordered +F..-F.
std::vector<double> stark_energies(SpinF f, double stark_e1_hz);

/// H = bias * F_z + transverse * F_azimuth + diag(stark energies), z basis, Hz.
ComplexMatrix edm_hamiltonian(const EdmConfig& cfg);

/// Sorted eigenvalues of diag(stark) + transverse * F_x at each grid point,
/// divided by stark_e1 (which must be nonzero).  Bias is zero here: this is
/// the level-deformation study.
std::vector<std::vector<double>> eigen_spectrum_scan(SpinF f, double stark_e1_hz,
                                                     std::span<const double> transverse_grid_hz);

/// Energy difference (Hz) between the two eigenstates adiabatically connected
/// to m = +F and m = -F, for H = diag(stark) + transverse * F_x.  The pair is
/// identified by eigenvector weight on |+F> and |-F| (each must exceed 0.5,
/// otherwise a NumericalError flags the identification as ambiguous).  The
/// eigenproblem runs in extended precision internally: the splitting scales
/// as transverse^(2F) and underflows double-precision eigensolving in the
/// small-field regime.
double stretched_splitting(SpinF f, double stark_e1_hz, double transverse_hz);

struct PeakValleyDifference {
  double midpoint_hz;  // mean of the two extremum positions
  double difference;   // |value(peak) - value(valley)|, adjacent extrema
};

/// Even-parity fringe against bias field at fixed precession time, with
/// extrema annotations and adjacent peak-valley differences.
struct FringeCurve {
  std::vector<double> scan_values_hz;
  std::vector<double> observable;
  ExtremaList extrema;
  std::vector<PeakValleyDifference> pv_differences;
};

/// Densest fringe component against bias has period 1/(2F tau); this step
/// gives 20 samples per such period.
double auto_bias_step_hz(SpinF f, double tau_s);

/// Uniform grid start..stop (inclusive within half a step) at the given step.
std::vector<double> uniform_grid(double start, double stop, double step);

/// For each bias value: prepare |F,0>_x, evolve under edm_hamiltonian for
/// tau seconds, measure the even-parity probability in the x basis.
/// Refuses grids coarser than auto_bias_step_hz, which would alias the
/// extrema detection.  Points run in parallel; output is in grid order and
/// fully deterministic.
FringeCurve fringe_scan(const EdmConfig& cfg, std::span<const double> bias_grid_hz);

/// Transverse-free oracle: the same even-parity observable with
/// transverse = 0 reduces to the ideal fringe sampled at phi = 2 pi B tau
/// (the tensor Stark shift drops out of the parity measurement).
std::vector<double> ideal_even_fringe(SpinF f, double tau_s, std::span<const double> bias_grid_hz);

struct RobustnessResult {
  double threshold_hz;                 // smallest bias from which the tail stays stable
  double stability_tolerance;          // relative band around the cluster centers
  std::vector<double> cluster_centers; // distinct ideal adjacent-extrema differences
};

/// Smallest bias above which every adjacent peak-valley difference stays
/// within 10% of the nearest ideal-fringe difference.  Cluster centers come
/// from the last full period of the transverse-free oracle on the same grid.
RobustnessResult robustness_threshold(const EdmConfig& cfg, std::span<const double> bias_grid_hz);

}  // namespace sublevel_sense
