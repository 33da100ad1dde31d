#pragma once

#include <string>
#include <vector>

#include "sublevel_sense/spin.hpp"

namespace sublevel_sense::cli {

/// "3", "3/2", "0.5", "10.5" -> twice-value.  Anything that is not a whole
/// or half integer is rejected.
int parse_twice_value(const std::string& text);

SpinF parse_spin(const std::string& text);
SublevelIndex parse_sublevel(const std::string& text);

std::string sublevel_label(SublevelIndex m);

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;  // 0 means "auto" (allowed only where documented)
  bool auto_step = false;
};

/// "start:stop:step" with step a positive number or the word "auto".
GridSpec parse_grid(const std::string& text);

std::vector<double> materialize(const GridSpec& grid);

}  // namespace sublevel_sense::cli
