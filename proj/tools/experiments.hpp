#pragma once

#include <string>
#include <vector>

namespace sublevel_sense::cli {

/// Raw option values shared by all subcommands; each runner resolves the
/// subset it uses.  Strings stay unparsed here so a config file and flags
/// can fill them interchangeably.
struct Options {
  std::string out;  // empty: "<experiment>.csv"
  int precision = 12;
  std::string config_path;

  std::string f = "3";
  std::string initial_m;  // empty: experiment-specific default
  std::string phases = "0:6.2832:0.001";
  std::string order;  // sequential; empty: m descending from +F
  std::string f_max = "6";

  std::string gamma_text;  // transverse tilt in radians; empty: use sin_gamma
  double sin_gamma = 0.1;
  std::string azimuth = "x";

  double stark_e1 = 5.0;
  double transverse = 10.0;
  std::string transverse_grid = "0:10:0.05";
  double tau = 3.0;
  std::string bias = "10:200:auto";
  bool with_splitting = false;
  std::string emit = "pv";
};

struct RunResult {
  std::string out_path;
  std::size_t rows;
};

struct ExperimentInfo {
  std::string name;
  std::string blurb;      // one line for --list and --help
  std::string reproduces; // anchor naming the quantity the CSV reproduces
  RunResult (*run)(const Options&);
};

const std::vector<ExperimentInfo>& experiments();

}  // namespace sublevel_sense::cli
