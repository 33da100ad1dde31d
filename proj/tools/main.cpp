#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "sublevel_sense/numerics.hpp"

namespace {

using sublevel_sense::cli::ExperimentInfo;
using sublevel_sense::cli::Options;

constexpr const char* kDescription =
    "sublevel-sense: spin-F precession metrology sweeps written as CSV.\n"
    "Each experiment maps to one library operation; run with --list to see them.";

struct AppModel {
  Options options;
  bool list = false;
};

// Builds the full CLI against the given model.  Called twice when a config
// file is in play: once to discover it, once to parse with its values
// injected (explicit flags still win through TakeLast).
std::unique_ptr<CLI::App> build_app(AppModel& model) {
  auto app = std::make_unique<CLI::App>(kDescription, "sublevel-sense");
  app->require_subcommand(0, 1);
  app->add_flag("--list", model.list, "list experiments with what each one reproduces");
  app->footer(
      "Config file: flat 'key = value' lines whose keys are the long option names\n"
      "of the chosen experiment; command-line flags override the file.\n"
      "Environment: SUBLEVEL_SENSE_THREADS caps sweep parallelism.\n"
      "Exit codes: 0 success, 2 configuration error, 3 numerical failure.");

  Options& o = model.options;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("--out", o.out, "output CSV path (default: <experiment>.csv)");
    sub->add_option("--precision", o.precision, "significant digits in CSV numbers")
        ->capture_default_str();
    sub->add_option("--config", o.config_path, "flat key = value config file");
    for (auto* opt : sub->get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  auto add_f = [&o](CLI::App* sub) {
    return sub->add_option("--f", o.f, "total angular momentum F (e.g. 3 or 3/2)")
        ->capture_default_str();
  };
  auto add_phases = [&o](CLI::App* sub) {
    return sub->add_option("--phases", o.phases, "phase grid start:stop:step (radians)")
        ->capture_default_str();
  };

  const auto& infos = sublevel_sense::cli::experiments();
  for (const ExperimentInfo& info : infos) {
    CLI::App* sub = app->add_subcommand(info.name, info.blurb);
    if (info.name == "precess" || info.name == "sequential") {
      add_f(sub);
      sub->add_option("--initial-m", o.initial_m, "initial sublevel m (default: stretched, +F)");
      add_phases(sub);
      if (info.name == "sequential") {
        sub->add_option("--order", o.order, "measurement order, comma-separated m values (default: +F..-F)");
      }
    } else if (info.name == "parity") {
      add_f(sub);
      sub->add_option("--initial-m", o.initial_m, "initial sublevel m (default: 0, or 1/2 for half-integer F)");
      add_phases(sub);
    } else if (info.name == "harmonic") {
      add_f(sub);
      add_phases(sub);
    } else if (info.name == "scaling") {
      sub->add_option("--f-max", o.f_max, "largest F in the table")->capture_default_str();
    } else if (info.name == "transverse") {
      add_f(sub);
      sub->add_option("--initial-m", o.initial_m, "initial sublevel m (default: 0, or 1/2 for half-integer F)");
      sub->add_option("--sin-gamma", o.sin_gamma, "sine of the field tilt")->capture_default_str();
      sub->add_option("--gamma", o.gamma_text, "field tilt in radians (overrides --sin-gamma)");
      sub->add_option("--azimuth", o.azimuth, "transverse direction: x or y")->capture_default_str();
      add_phases(sub);
    } else if (info.name == "edm-eigen") {
      add_f(sub);
      sub->add_option("--stark-e1", o.stark_e1, "tensor shift of |m|=1 in Hz")->capture_default_str();
      sub->add_option("--transverse", o.transverse_grid, "transverse grid start:stop:step (Hz)")
          ->capture_default_str();
      sub->add_flag("--splitting", o.with_splitting, "add the stretched-pair splitting column");
    } else if (info.name == "edm-scan" || info.name == "edm-threshold") {
      add_f(sub);
      sub->add_option("--stark-e1", o.stark_e1, "tensor shift of |m|=1 in Hz")->capture_default_str();
      sub->add_option("--transverse", o.transverse, "transverse field in Hz")->capture_default_str();
      sub->add_option("--azimuth", o.azimuth, "transverse direction: x or y")->capture_default_str();
      sub->add_option("--tau", o.tau, "precession time in seconds")->capture_default_str();
      sub->add_option("--bias", o.bias, "bias grid start:stop:step (Hz); step may be 'auto'")
          ->capture_default_str();
      if (info.name == "edm-scan") {
        sub->add_option("--emit", o.emit, "rows to write: pv, curve, or extrema")->capture_default_str();
      }
    }
    common(sub);
  }
  return app;
}

std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": empty key or value");
    }
    if (key == "config") {
      throw std::invalid_argument(path + ": config files cannot nest");
    }
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

void validate_config_keys(const CLI::App& sub, const std::vector<std::string>& tokens,
                          const std::string& path) {
  for (std::size_t i = 0; i < tokens.size(); i += 2) {
    if (!sub.get_option_no_throw(tokens[i])) {
      throw std::invalid_argument(path + ": unknown key '" + tokens[i].substr(2) +
                                  "' for experiment '" + sub.get_name() + "'");
    }
  }
}

int list_experiments() {
  for (const ExperimentInfo& info : sublevel_sense::cli::experiments()) {
    std::printf("%-14s %s\n", info.name.c_str(), info.blurb.c_str());
    std::printf("%-14s   reproduces: %s\n", "", info.reproduces.c_str());
  }
  return 0;
}

int run(int argc, char** argv) {
  AppModel model;
  auto app = build_app(model);
  try {
    app->parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app->exit(e);
  } catch (const CLI::ParseError& e) {
    app->exit(e);
    return 2;
  }
  if (model.list) return list_experiments();
  if (app->get_subcommands().empty()) {
    std::cerr << app->help();
    return 2;
  }
  CLI::App* chosen = app->get_subcommands().front();
  const std::string name = chosen->get_name();

  if (!model.options.config_path.empty()) {
    // Re-parse with the file's tokens injected right after the subcommand so
    // later (explicit) flags take precedence.
    const std::vector<std::string> injected = config_tokens(model.options.config_path);
    validate_config_keys(*chosen, injected, model.options.config_path);
    std::vector<std::string> args{argv, argv + argc};
    std::vector<std::string> merged;
    merged.reserve(args.size() + injected.size());
    bool inserted = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
      merged.push_back(args[i]);
      if (!inserted && i > 0 && args[i] == name) {
        merged.insert(merged.end(), injected.begin(), injected.end());
        inserted = true;
      }
    }
    AppModel fresh;
    auto reparsed = build_app(fresh);
    std::vector<const char*> cargs;
    cargs.reserve(merged.size());
    for (const std::string& a : merged) cargs.push_back(a.c_str());
    try {
      reparsed->parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
      reparsed->exit(e);
      return 2;
    }
    model = std::move(fresh);
  }

  for (const ExperimentInfo& info : sublevel_sense::cli::experiments()) {
    if (info.name == name) {
      const sublevel_sense::cli::RunResult result = info.run(model.options);
      std::printf("%s: wrote %zu data rows to %s\n", name.c_str(), result.rows,
                  result.out_path.c_str());
      return 0;
    }
  }
  std::cerr << "unknown experiment: " << name << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const sublevel_sense::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
