#include "sublevel_sense/edm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sublevel_sense/detail/jacobi_real.hpp"
#include "sublevel_sense/parallel.hpp"

namespace sublevel_sense {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void EdmConfig::validate() const {
  if (!(tau_s > 0.0)) throw std::invalid_argument("EdmConfig: tau must be positive");
  if (!std::isfinite(stark_e1_hz) || !std::isfinite(transverse_hz) || !std::isfinite(bias_hz)) {
    throw std::invalid_argument("EdmConfig: frequencies must be finite");
  }
}

std::vector<double> stark_energies(SpinF f, double stark_e1_hz) {
  if (stark_e1_hz < 0.0) throw std::invalid_argument("stark_energies: stark_e1 must be >= 0");
  std::vector<double> out(f.dimension());
  for (std::size_t i = 0; i < f.dimension(); ++i) {
    const double m = sublevel_at(f, i).value();
    out[i] = stark_e1_hz * m * m;
  }
  return out;
}

ComplexMatrix edm_hamiltonian(const EdmConfig& cfg) {
  cfg.validate();
  ComplexMatrix h = ComplexMatrix::diagonal(stark_energies(cfg.f, cfg.stark_e1_hz));
  ComplexMatrix fz = operator_fz(cfg.f);
  fz *= cfg.bias_hz;
  h += fz;
  if (cfg.transverse_hz != 0.0) {
    ComplexMatrix fa = cfg.transverse_azimuth == TransverseAzimuth::x ? operator_fx(cfg.f)
                                                                      : operator_fy(cfg.f);
    fa *= cfg.transverse_hz;
    h += fa;
  }
  return h;
}

std::vector<std::vector<double>> eigen_spectrum_scan(SpinF f, double stark_e1_hz,
                                                     std::span<const double> transverse_grid_hz) {
  if (stark_e1_hz == 0.0) {
    throw std::invalid_argument("eigen_spectrum_scan: stark_e1 must be nonzero (it sets the scale)");
  }
  std::vector<std::vector<double>> out(transverse_grid_hz.size());
  parallel_for(transverse_grid_hz.size(), [&](std::size_t i) {
    EdmConfig cfg;
    cfg.f = f;
    cfg.stark_e1_hz = stark_e1_hz;
    cfg.transverse_hz = transverse_grid_hz[i];
    cfg.transverse_azimuth = TransverseAzimuth::x;
    cfg.bias_hz = 0.0;
    const EigenDecomposition eig = eigh(edm_hamiltonian(cfg));
    std::vector<double> scaled(eig.eigenvalues.size());
    for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] = eig.eigenvalues[k] / stark_e1_hz;
    out[i] = std::move(scaled);
  });
  return out;
}

double stretched_splitting(SpinF f, double stark_e1_hz, double transverse_hz) {
  if (!(stark_e1_hz > 0.0)) throw std::invalid_argument("stretched_splitting: stark_e1 must be positive");
  if (transverse_hz < 0.0) throw std::invalid_argument("stretched_splitting: transverse must be >= 0");
  using detail::quad;

  const std::size_t n = f.dimension();
  // H = diag(stark) + t * F_x, real symmetric, assembled in extended precision.
  std::vector<quad> h(n * n, quad(0));
  for (std::size_t i = 0; i < n; ++i) {
    const double m = sublevel_at(f, i).value();
    h[i * n + i] = quad(stark_e1_hz) * quad(m) * quad(m);
  }
  const ComplexMatrix fx = operator_fx(f);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const quad e = quad(transverse_hz) * quad(fx(i, i + 1).real());
    h[i * n + (i + 1)] = e;
    h[(i + 1) * n + i] = e;
  }

  const auto eig = detail::jacobi_symmetric<quad>(std::move(h), n);

  // The pair adiabatically connected to m = +-F carries the dominant weight
  // on the first and last basis slots.
  std::size_t best = n, second = n;
  double best_w = -1.0, second_w = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double top = static_cast<double>(eig.vectors[0 * n + k]);
    const double bottom = static_cast<double>(eig.vectors[(n - 1) * n + k]);
    const double w = top * top + bottom * bottom;
    if (w > best_w) {
      second = best;
      second_w = best_w;
      best = k;
      best_w = w;
    } else if (w > second_w) {
      second = k;
      second_w = w;
    }
  }
  if (best_w <= 0.5 || second_w <= 0.5) {
    throw NumericalError(
        "stretched_splitting: stretched-pair identification is ambiguous (transverse is not small "
        "against the tensor shifts; weights " +
        std::to_string(best_w) + ", " + std::to_string(second_w) + ")");
  }
  return static_cast<double>(detail::scalar_abs(eig.eigenvalues[best] - eig.eigenvalues[second]));
}

double auto_bias_step_hz(SpinF f, double tau_s) {
  if (!(tau_s > 0.0)) throw std::invalid_argument("auto_bias_step_hz: tau must be positive");
  return 1.0 / (static_cast<double>(f.twice_f) * tau_s * 20.0);
}

std::vector<double> uniform_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("uniform_grid: step must be positive");
  if (!(stop >= start)) throw std::invalid_argument("uniform_grid: stop must be >= start");
  std::vector<double> out;
  const std::size_t count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v > stop + step * 1e-9) break;
    out.push_back(v);
  }
  return out;
}

namespace {

std::vector<PeakValleyDifference> adjacent_differences(const ExtremaList& extrema) {
  std::vector<PeakValleyDifference> out;
  if (extrema.size() < 2) return out;
  out.reserve(extrema.size() - 1);
  for (std::size_t i = 0; i + 1 < extrema.size(); ++i) {
    out.push_back(PeakValleyDifference{
        0.5 * (extrema.positions[i] + extrema.positions[i + 1]),
        std::abs(extrema.values[i] - extrema.values[i + 1])});
  }
  return out;
}

void check_grid(const EdmConfig& cfg, std::span<const double> bias_grid_hz) {
  if (bias_grid_hz.size() < 3) throw std::invalid_argument("fringe_scan: need at least 3 grid points");
  const double max_step = auto_bias_step_hz(cfg.f, cfg.tau_s);
  for (std::size_t i = 1; i < bias_grid_hz.size(); ++i) {
    const double step = bias_grid_hz[i] - bias_grid_hz[i - 1];
    if (!(step > 0.0)) throw std::invalid_argument("fringe_scan: bias grid must be strictly increasing");
    if (step > max_step * (1.0 + 1e-9)) {
      throw std::invalid_argument("fringe_scan: grid step " + std::to_string(step) +
                                  " Hz is coarser than the " + std::to_string(max_step) +
                                  " Hz needed to resolve the fastest fringe component");
    }
  }
}

}  // namespace

FringeCurve fringe_scan(const EdmConfig& cfg, std::span<const double> bias_grid_hz) {
  cfg.validate();
  check_grid(cfg, bias_grid_hz);

  const std::vector<Complex> z0 = state_in_z_basis(basis_state(cfg.f, SublevelIndex{0}, Axis::x));
  const ParityObservable parity = make_parity_observable(cfg.f);
  const std::size_t n = cfg.f.dimension();

  FringeCurve curve;
  curve.scan_values_hz.assign(bias_grid_hz.begin(), bias_grid_hz.end());
  curve.observable.resize(bias_grid_hz.size());

  parallel_for(bias_grid_hz.size(), [&](std::size_t i) {
    EdmConfig point = cfg;
    point.bias_hz = bias_grid_hz[i];
    const std::vector<Complex> evolved =
        evolve(edm_hamiltonian(point), cfg.tau_s, std::span<const Complex>(z0));
    const std::vector<Complex> pz = parity.z_form * std::span<const Complex>(evolved);
    Complex acc{};
    for (std::size_t k = 0; k < n; ++k) acc += std::conj(evolved[k]) * pz[k];
    curve.observable[i] = acc.real();
  });

  curve.extrema = find_extrema(curve.scan_values_hz, curve.observable);
  curve.pv_differences = adjacent_differences(curve.extrema);
  return curve;
}

std::vector<double> ideal_even_fringe(SpinF f, double tau_s,
                                      std::span<const double> bias_grid_hz) {
  const PrecessionEngine engine(basis_state(f, SublevelIndex{0}, Axis::x));
  const std::vector<SublevelIndex> levels = all_sublevels(f);
  std::vector<double> out(bias_grid_hz.size());
  parallel_for(bias_grid_hz.size(), [&](std::size_t i) {
    const SublevelProbabilities probs = engine.probabilities_at(kTwoPi * bias_grid_hz[i] * tau_s);
    double even = 0.0;
    for (std::size_t k = 0; k < probs.p.size(); ++k) {
      if (is_even_sublevel(levels[k])) even += probs.p[k];
    }
    out[i] = even;
  });
  return out;
}

RobustnessResult robustness_threshold(const EdmConfig& cfg, std::span<const double> bias_grid_hz) {
  const FringeCurve curve = fringe_scan(cfg, bias_grid_hz);
  if (curve.pv_differences.empty()) {
    throw std::invalid_argument("robustness_threshold: scan produced no adjacent extrema");
  }

  // Cluster centers: distinct adjacent-extrema differences over the last
  // full period of the transverse-free oracle, sampled on the same grid so
  // discretization bias cancels.
  const std::vector<double> ideal = ideal_even_fringe(cfg.f, cfg.tau_s, bias_grid_hz);
  const ExtremaList ideal_extrema = find_extrema(bias_grid_hz, ideal);
  const std::vector<PeakValleyDifference> ideal_diffs = adjacent_differences(ideal_extrema);
  if (ideal_diffs.empty()) {
    throw std::invalid_argument("robustness_threshold: oracle fringe has no extrema on this grid");
  }
  const double period_hz = 1.0 / (2.0 * cfg.tau_s);  // ideal fringe period against bias
  const double last_period_start = bias_grid_hz.back() - period_hz;
  std::vector<double> centers;
  for (const PeakValleyDifference& d : ideal_diffs) {
    if (d.midpoint_hz < last_period_start) continue;
    bool duplicate = false;
    for (const double c : centers) {
      if (std::abs(c - d.difference) < 1e-6) duplicate = true;
    }
    if (!duplicate) centers.push_back(d.difference);
  }
  std::sort(centers.begin(), centers.end());

  constexpr double kStabilityTol = 0.10;
  auto stable = [&](double difference) {
    for (const double c : centers) {
      if (std::abs(difference - c) <= kStabilityTol * c) return true;
    }
    return false;
  };

  // Walk backwards from the top of the scan: the threshold is the midpoint
  // of the first difference of the stable tail.  A tail shorter than three
  // ideal periods is not evidence of stability, just a lucky endpoint.
  std::size_t first_stable = curve.pv_differences.size();
  for (std::size_t i = curve.pv_differences.size(); i-- > 0;) {
    if (!stable(curve.pv_differences[i].difference)) break;
    first_stable = i;
  }
  const double threshold = first_stable == 0 ? bias_grid_hz.front()
                           : first_stable < curve.pv_differences.size()
                               ? curve.pv_differences[first_stable].midpoint_hz
                               : bias_grid_hz.back();
  if (bias_grid_hz.back() - threshold < 3.0 * period_hz) {
    throw std::invalid_argument(
        "robustness_threshold: fringe does not stabilize within the scan range; extend the bias scan");
  }
  return RobustnessResult{threshold, kStabilityTol, std::move(centers)};
}

}  // namespace sublevel_sense
