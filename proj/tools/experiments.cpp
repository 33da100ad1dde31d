#include "experiments.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "csv.hpp"
#include "parse_args.hpp"
#include "sublevel_sense/combiner.hpp"
#include "sublevel_sense/edm.hpp"
#include "sublevel_sense/observables.hpp"
#include "sublevel_sense/parallel.hpp"
#include "sublevel_sense/transverse.hpp"

namespace sublevel_sense::cli {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

SublevelIndex resolve_initial_m(SpinF f, const std::string& text, bool default_stretched) {
  if (!text.empty()) {
    const SublevelIndex m = parse_sublevel(text);
    validate_sublevel(f, m);
    return m;
  }
  if (default_stretched) return SublevelIndex{f.twice_f};
  return SublevelIndex{f.is_integer() ? 0 : 1};  // |F,0> or |F,1/2>
}

std::string echo(std::initializer_list<std::pair<std::string, std::string>> kv) {
  std::ostringstream out;
  out << "config:";
  for (const auto& [k, v] : kv) out << " " << k << "=" << v;
  return out.str();
}

std::string out_path_or(const Options& opt, const std::string& name) {
  return opt.out.empty() ? name + ".csv" : opt.out;
}

TransverseAzimuth parse_azimuth(const std::string& text) {
  if (text == "x") return TransverseAzimuth::x;
  if (text == "y") return TransverseAzimuth::y;
  throw std::invalid_argument("azimuth must be x or y, got '" + text + "'");
}

double resolve_gamma(const Options& opt) {
  if (!opt.gamma_text.empty()) {
    std::size_t used = 0;
    const double g = std::stod(opt.gamma_text, &used);
    if (used != opt.gamma_text.size()) {
      throw std::invalid_argument("invalid gamma: '" + opt.gamma_text + "'");
    }
    return g;
  }
  if (!(opt.sin_gamma >= 0.0 && opt.sin_gamma < 1.0)) {
    throw std::invalid_argument("sin-gamma must lie in [0, 1)");
  }
  return std::asin(opt.sin_gamma);
}

RunResult finish(CsvWriter& csv, const std::string& path) {
  csv.write(path);
  return RunResult{path, csv.row_count()};
}

// --- precess ---------------------------------------------------------------

RunResult run_precess(const Options& opt) {
  const SpinF f = parse_spin(opt.f);
  const SublevelIndex m0 = resolve_initial_m(f, opt.initial_m, /*default_stretched=*/true);
  const std::vector<double> phases = materialize(parse_grid(opt.phases));
  const std::vector<SublevelIndex> levels = all_sublevels(f);

  CsvWriter csv(opt.precision);
  csv.comment("experiment: precess");
  csv.comment("reproduces: sublevel populations and inverse phase uncertainties vs phase");
  csv.comment(echo({{"f", opt.f},
                    {"initial_m", sublevel_label(m0)},
                    {"phases", opt.phases},
                    {"precision", std::to_string(opt.precision)}}));
  std::vector<std::string> header{"phase"};
  for (const SublevelIndex m : levels) header.push_back("p_" + sublevel_label(m));
  for (const SublevelIndex m : levels) header.push_back("inv_dphi_" + sublevel_label(m));
  header.push_back("inv_dphi_Fx");
  csv.header(std::move(header));

  const PrecessionEngine engine(basis_state(f, m0, Axis::x));
  std::vector<std::vector<CsvWriter::Cell>> rows(phases.size());
  parallel_for(phases.size(), [&](std::size_t i) {
    const SublevelProbabilities probs = engine.probabilities_at(phases[i]);
    std::vector<CsvWriter::Cell> row{phases[i]};
    double mean = 0.0, second = 0.0, mean_slope = 0.0;
    for (std::size_t k = 0; k < probs.p.size(); ++k) {
      row.emplace_back(probs.p[k]);
      const double m = levels[k].value();
      mean += m * probs.p[k];
      second += m * m * probs.p[k];
      mean_slope += m * probs.dp_dphi[k];
    }
    for (std::size_t k = 0; k < probs.p.size(); ++k) {
      double complement = 0.0;
      for (std::size_t j = 0; j < probs.p.size(); ++j) {
        if (j != k) complement += probs.p[j];
      }
      row.emplace_back(inverse_or_zero(uncertainty_from(probs.p[k] * complement, probs.dp_dphi[k])));
    }
    row.emplace_back(inverse_or_zero(uncertainty_from(second - mean * mean, mean_slope)));
    rows[i] = std::move(row);
  });
  for (auto& row : rows) csv.row(std::move(row));
  return finish(csv, out_path_or(opt, "precess"));
}

// --- sequential ------------------------------------------------------------

RunResult run_sequential(const Options& opt) {
  const SpinF f = parse_spin(opt.f);
  const SublevelIndex m0 = resolve_initial_m(f, opt.initial_m, /*default_stretched=*/true);
  const std::vector<double> phases = materialize(parse_grid(opt.phases));

  std::vector<SublevelIndex> order;
  if (opt.order.empty()) {
    order = all_sublevels(f);
  } else {
    std::stringstream stream(opt.order);
    std::string token;
    while (std::getline(stream, token, ',')) order.push_back(parse_sublevel(token));
  }

  CsvWriter csv(opt.precision);
  csv.comment("experiment: sequential");
  csv.comment("reproduces: conditional probabilities and sensitivities of the measurement chain");
  csv.comment("note: nan marks steps the chain never reaches (prior outcomes exhausted)");
  std::string order_text;
  for (std::size_t i = 0; i < order.size(); ++i) {
    order_text += (i ? "," : "") + sublevel_label(order[i]);
  }
  csv.comment(echo({{"f", opt.f},
                    {"initial_m", sublevel_label(m0)},
                    {"order", order_text},
                    {"phases", opt.phases},
                    {"precision", std::to_string(opt.precision)}}));

  std::vector<std::string> header{"phase"};
  for (std::size_t k = 0; k + 1 < order.size(); ++k) header.push_back("cond_p_" + sublevel_label(order[k]));
  for (std::size_t k = 0; k + 1 < order.size(); ++k) header.push_back("inv_dphi_" + sublevel_label(order[k]));
  header.push_back("inv_dphi_combined");
  csv.header(std::move(header));

  const PrecessionSetup setup = PrecessionSetup::make(basis_state(f, m0, Axis::x), 0.0);
  const std::size_t informative = order.size() - 1;
  std::vector<std::vector<CsvWriter::Cell>> rows(phases.size());
  parallel_for(phases.size(), [&](std::size_t i) {
    PrecessionSetup point = setup;
    point.phase = phases[i];
    const UncertaintyReport report = sequential_uncertainties(point, order);
    std::vector<CsvWriter::Cell> row{phases[i]};
    for (std::size_t k = 0; k < informative; ++k) {
      row.emplace_back(k < report.steps.size() ? report.steps[k].conditional_p : kNan);
    }
    for (std::size_t k = 0; k < informative; ++k) {
      row.emplace_back(k < report.steps.size() ? inverse_or_zero(report.steps[k].delta_phi) : kNan);
    }
    row.emplace_back(inverse_or_zero(report.combined));
    rows[i] = std::move(row);
  });
  for (auto& row : rows) csv.row(std::move(row));
  return finish(csv, out_path_or(opt, "sequential"));
}

// --- parity ----------------------------------------------------------------

RunResult run_parity(const Options& opt) {
  const SpinF f = parse_spin(opt.f);
  const SublevelIndex m0 = resolve_initial_m(f, opt.initial_m, /*default_stretched=*/false);
  const std::vector<double> phases = materialize(parse_grid(opt.phases));

  CsvWriter csv(opt.precision);
  csv.comment("experiment: parity");
  csv.comment("reproduces: even-sublevel population fringe and its sensitivity");
  csv.comment(echo({{"f", opt.f},
                    {"initial_m", sublevel_label(m0)},
                    {"phases", opt.phases},
                    {"precision", std::to_string(opt.precision)}}));
  csv.header({"phase", "p_even", "slope", "inv_dphi"});

  const PrecessionEngine engine(basis_state(f, m0, Axis::x));
  const std::vector<SublevelIndex> levels = all_sublevels(f);
  std::vector<std::vector<CsvWriter::Cell>> rows(phases.size());
  parallel_for(phases.size(), [&](std::size_t i) {
    const SublevelProbabilities probs = engine.probabilities_at(phases[i]);
    double value = 0.0, slope = 0.0;
    for (std::size_t k = 0; k < probs.p.size(); ++k) {
      if (is_even_sublevel(levels[k])) {
        value += probs.p[k];
        slope += probs.dp_dphi[k];
      }
    }
    rows[i] = {phases[i], value, slope,
               inverse_or_zero(uncertainty_from(value * (1.0 - value), slope))};
  });
  for (auto& row : rows) csv.row(std::move(row));
  return finish(csv, out_path_or(opt, "parity"));
}

// --- harmonic ----------------------------------------------------------------

RunResult run_harmonic(const Options& opt) {
  const SpinF f = parse_spin(opt.f);
  const std::vector<double> phases = materialize(parse_grid(opt.phases));
  const HarmonicWeights weights = harmonic_weights(f);

  CsvWriter csv(opt.precision);
  csv.comment("experiment: harmonic");
  csv.comment("reproduces: weighted sublevel combination carrying only the 2F-th harmonic");
  std::string weight_text;
  for (std::size_t i = 0; i < weights.alpha.size(); ++i) {
    weight_text += (i ? "," : "") + csv.format(weights.alpha[i]);
  }
  csv.comment("weights alpha_|m|: " + weight_text);
  csv.comment(echo({{"f", opt.f},
                    {"phases", opt.phases},
                    {"precision", std::to_string(opt.precision)}}));
  csv.header({"phase", "signal", "slope", "inv_dphi"});

  const PrecessionEngine engine(basis_state(f, SublevelIndex{0}, Axis::x));
  const std::vector<SublevelIndex> levels = all_sublevels(f);
  std::vector<std::vector<CsvWriter::Cell>> rows(phases.size());
  parallel_for(phases.size(), [&](std::size_t i) {
    const SublevelProbabilities probs = engine.probabilities_at(phases[i]);
    double value = 0.0, slope = 0.0;
    for (std::size_t k = 0; k < probs.p.size(); ++k) {
      const double alpha = weights.alpha[std::abs(levels[k].twice_m) / 2];
      value += alpha * probs.p[k];
      slope += alpha * probs.dp_dphi[k];
    }
    // Projection noise of the weighted sum: var = sum alpha^2 p - (sum alpha p)^2.
    double second = 0.0;
    for (std::size_t k = 0; k < probs.p.size(); ++k) {
      const double alpha = weights.alpha[std::abs(levels[k].twice_m) / 2];
      second += alpha * alpha * probs.p[k];
    }
    rows[i] = {phases[i], value, slope,
               inverse_or_zero(uncertainty_from(second - value * value, slope))};
  });
  for (auto& row : rows) csv.row(std::move(row));
  return finish(csv, out_path_or(opt, "harmonic"));
}

// --- scaling -----------------------------------------------------------------

RunResult run_scaling(const Options& opt) {
  const SpinF f_max = parse_spin(opt.f_max);
  const std::vector<ScalingRow> table = scaling_table(f_max);

  CsvWriter csv(opt.precision);
  csv.comment("experiment: scaling");
  csv.comment("reproduces: phase-uncertainty scaling with F (Larmor, center-state combined, optimal)");
  csv.comment(echo({{"f_max", opt.f_max}, {"precision", std::to_string(opt.precision)}}));
  csv.header({"twice_f", "f", "dphi_larmor", "dphi_combined", "dphi_optimal", "inv_dphi_larmor",
              "inv_dphi_combined", "inv_dphi_optimal"});
  for (const ScalingRow& row : table) {
    csv.row({static_cast<long long>(row.twice_f), row.twice_f / 2.0, row.larmor,
             row.combined_from_center, row.optimal, 1.0 / row.larmor,
             1.0 / row.combined_from_center, 1.0 / row.optimal});
  }
  return finish(csv, out_path_or(opt, "scaling"));
}

// --- transverse ---------------------------------------------------------------

RunResult run_transverse(const Options& opt) {
  const SpinF f = parse_spin(opt.f);
  const SublevelIndex m0 = resolve_initial_m(f, opt.initial_m, /*default_stretched=*/false);
  const double gamma = resolve_gamma(opt);
  const TransverseAzimuth azimuth = parse_azimuth(opt.azimuth);
  const std::vector<double> phases = materialize(parse_grid(opt.phases));
  const bool with_harmonic = f.is_integer() && m0.twice_m == 0 && f.twice_f >= 2;

  CsvWriter csv(opt.precision);
  csv.comment("experiment: transverse");
  csv.comment("reproduces: tilted-field precession vs the ideal fringe, and the beta(phi) remap");
  csv.comment(echo({{"f", opt.f},
                    {"initial_m", sublevel_label(m0)},
                    {"gamma", csv.format(gamma)},
                    {"azimuth", opt.azimuth},
                    {"phases", opt.phases},
                    {"precision", std::to_string(opt.precision)}}));
  std::vector<std::string> header{"phase", "beta", "p_init_tilted", "p_even_tilted"};
  if (with_harmonic) header.push_back("harmonic_tilted");
  header.insert(header.end(), {"p_init_ideal", "p_even_ideal"});
  if (with_harmonic) header.push_back("harmonic_ideal");
  csv.header(std::move(header));

  const HarmonicWeights weights = with_harmonic ? harmonic_weights(f) : HarmonicWeights{f, {}};
  const PrecessionEngine ideal(basis_state(f, m0, Axis::x));
  const std::vector<SublevelIndex> levels = all_sublevels(f);
  const std::size_t init_slot = slot_of(f, m0);

  auto reduce = [&](const SublevelProbabilities& probs, std::vector<CsvWriter::Cell>& row) {
    double even = 0.0, harm = 0.0;
    for (std::size_t k = 0; k < probs.p.size(); ++k) {
      if (is_even_sublevel(levels[k])) even += probs.p[k];
      if (with_harmonic) harm += weights.alpha[std::abs(levels[k].twice_m) / 2] * probs.p[k];
    }
    row.emplace_back(probs.p[init_slot]);
    row.emplace_back(even);
    if (with_harmonic) row.emplace_back(harm);
  };

  std::vector<std::vector<CsvWriter::Cell>> rows(phases.size());
  parallel_for(phases.size(), [&](std::size_t i) {
    const double phi = phases[i];
    const SublevelProbabilities tilted = tilted_precession(
        TiltedFieldSetup::make(basis_state(f, m0, Axis::x), gamma, azimuth, phi));
    const SublevelProbabilities plain = ideal.probabilities_at(phi);
    std::vector<CsvWriter::Cell> row{phi, beta_from_phi(phi, gamma)};
    reduce(tilted, row);
    reduce(plain, row);
    rows[i] = std::move(row);
  });
  for (auto& row : rows) csv.row(std::move(row));
  return finish(csv, out_path_or(opt, "transverse"));
}

// --- edm-eigen -----------------------------------------------------------------

RunResult run_edm_eigen(const Options& opt) {
  const SpinF f = parse_spin(opt.f);
  const std::vector<double> grid = materialize(parse_grid(opt.transverse_grid));
  const auto spectra = eigen_spectrum_scan(f, opt.stark_e1, grid);

  CsvWriter csv(opt.precision);
  csv.comment("experiment: edm-eigen");
  csv.comment("reproduces: eigenenergies scaled to the tensor shift vs transverse field" +
              std::string(opt.with_splitting ? "; stretched-pair splitting" : ""));
  if (opt.with_splitting) {
    csv.comment("note: splitting_hz is nan where the stretched pair cannot be identified");
  }
  csv.comment(echo({{"f", opt.f},
                    {"stark_e1", csv.format(opt.stark_e1)},
                    {"transverse", opt.transverse_grid},
                    {"splitting", opt.with_splitting ? "true" : "false"},
                    {"precision", std::to_string(opt.precision)}}));
  std::vector<std::string> header{"transverse_hz", "transverse_over_stark"};
  for (std::size_t k = 0; k < f.dimension(); ++k) header.push_back("eig_scaled_" + std::to_string(k));
  if (opt.with_splitting) header.push_back("splitting_hz");
  csv.header(std::move(header));

  std::vector<double> splitting(grid.size(), kNan);
  if (opt.with_splitting) {
    parallel_for(grid.size(), [&](std::size_t i) {
      try {
        splitting[i] = stretched_splitting(f, opt.stark_e1, grid[i]);
      } catch (const NumericalError&) {
        // ambiguous identification stays nan
      }
    });
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<CsvWriter::Cell> row{grid[i], grid[i] / opt.stark_e1};
    for (const double lambda : spectra[i]) row.emplace_back(lambda);
    if (opt.with_splitting) row.emplace_back(splitting[i]);
    csv.row(std::move(row));
  }
  return finish(csv, out_path_or(opt, "edm-eigen"));
}

// --- edm-scan ---------------------------------------------------------------

EdmConfig edm_config_from(const Options& opt) {
  EdmConfig cfg;
  cfg.f = parse_spin(opt.f);
  cfg.stark_e1_hz = opt.stark_e1;
  cfg.transverse_hz = opt.transverse;
  cfg.transverse_azimuth = parse_azimuth(opt.azimuth);
  cfg.tau_s = opt.tau;
  return cfg;
}

std::vector<double> bias_grid_from(const Options& opt, const EdmConfig& cfg) {
  GridSpec grid = parse_grid(opt.bias);
  if (grid.auto_step) {
    grid.step = auto_bias_step_hz(cfg.f, cfg.tau_s);
    grid.auto_step = false;
  }
  return materialize(grid);
}

void echo_edm(CsvWriter& csv, const Options& opt, std::initializer_list<std::pair<std::string, std::string>> extra) {
  std::vector<std::pair<std::string, std::string>> kv{
      {"f", opt.f},
      {"stark_e1", csv.format(opt.stark_e1)},
      {"transverse", csv.format(opt.transverse)},
      {"azimuth", opt.azimuth},
      {"tau", csv.format(opt.tau)},
      {"bias", opt.bias},
      {"precision", std::to_string(opt.precision)}};
  kv.insert(kv.end(), extra);
  std::ostringstream out;
  out << "config:";
  for (const auto& [k, v] : kv) out << " " << k << "=" << v;
  csv.comment(out.str());
}

RunResult run_edm_scan(const Options& opt) {
  const EdmConfig cfg = edm_config_from(opt);
  const std::vector<double> grid = bias_grid_from(opt, cfg);
  const FringeCurve curve = fringe_scan(cfg, grid);

  CsvWriter csv(opt.precision);
  csv.comment("experiment: edm-scan");
  csv.comment("reproduces: adjacent peak-valley differences across a bias scan at fixed time");
  echo_edm(csv, opt, {{"emit", opt.emit}});

  if (opt.emit == "curve") {
    csv.header({"bias_hz", "p_even"});
    for (std::size_t i = 0; i < curve.scan_values_hz.size(); ++i) {
      csv.row({curve.scan_values_hz[i], curve.observable[i]});
    }
  } else if (opt.emit == "extrema") {
    csv.header({"bias_hz", "value", "kind"});
    for (std::size_t i = 0; i < curve.extrema.size(); ++i) {
      csv.row({curve.extrema.positions[i], curve.extrema.values[i],
               std::string(curve.extrema.kinds[i] == ExtremumKind::peak ? "peak" : "valley")});
    }
  } else if (opt.emit == "pv") {
    csv.header({"bias_mid_hz", "pv_difference"});
    for (const PeakValleyDifference& d : curve.pv_differences) {
      csv.row({d.midpoint_hz, d.difference});
    }
  } else {
    throw std::invalid_argument("emit must be pv, curve, or extrema; got '" + opt.emit + "'");
  }
  return finish(csv, out_path_or(opt, "edm-scan"));
}

// --- edm-threshold -------------------------------------------------------------

RunResult run_edm_threshold(const Options& opt) {
  const EdmConfig cfg = edm_config_from(opt);
  const std::vector<double> grid = bias_grid_from(opt, cfg);
  const RobustnessResult result = robustness_threshold(cfg, grid);

  CsvWriter csv(opt.precision);
  csv.comment("experiment: edm-threshold");
  csv.comment("reproduces: minimum bias field for a stable fringe pattern");
  echo_edm(csv, opt, {});
  std::vector<std::string> header{"threshold_hz", "transverse_hz", "threshold_over_transverse",
                                  "stability_tolerance"};
  for (std::size_t i = 0; i < result.cluster_centers.size(); ++i) {
    header.push_back("cluster_" + std::to_string(i + 1));
  }
  csv.header(std::move(header));
  std::vector<CsvWriter::Cell> row{result.threshold_hz, cfg.transverse_hz,
                                   cfg.transverse_hz != 0.0 ? result.threshold_hz / cfg.transverse_hz
                                                            : kNan,
                                   result.stability_tolerance};
  for (const double c : result.cluster_centers) row.emplace_back(c);
  csv.row(std::move(row));
  return finish(csv, out_path_or(opt, "edm-threshold"));
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> list{
      {"precess", "sublevel populations and sensitivities vs phase",
       "sublevel populations and inverse phase uncertainties vs phase", run_precess},
      {"sequential", "sequential-measurement conditional probabilities and combined sensitivity",
       "conditional probabilities and sensitivities of the measurement chain", run_sequential},
      {"parity", "even-sublevel population fringe",
       "even-sublevel population fringe and its sensitivity", run_parity},
      {"harmonic", "pure 2F-harmonic weighted combination",
       "weighted sublevel combination carrying only the 2F-th harmonic", run_harmonic},
      {"scaling", "uncertainty scaling with F",
       "phase-uncertainty scaling with F (Larmor, center-state combined, optimal)", run_scaling},
      {"transverse", "tilted-field precession and the beta(phi) remap",
       "tilted-field precession vs the ideal fringe, and the beta(phi) remap", run_transverse},
      {"edm-eigen", "level deformation by a transverse field",
       "eigenenergies scaled to the tensor shift vs transverse field", run_edm_eigen},
      {"edm-scan", "bias-field contrast scan",
       "adjacent peak-valley differences across a bias scan at fixed time", run_edm_scan},
      {"edm-threshold", "bias field needed for a stable fringe",
       "minimum bias field for a stable fringe pattern", run_edm_threshold},
  };
  return list;
}

}  // namespace sublevel_sense::cli
