#include "parse_args.hpp"

#include <cmath>
#include <stdexcept>

#include "sublevel_sense/edm.hpp"

namespace sublevel_sense::cli {

namespace {

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid " + what + ": '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("invalid " + what + ": '" + text + "'");
  return value;
}

}  // namespace

int parse_twice_value(const std::string& text) {
  const std::size_t slash = text.find('/');
  if (slash != std::string::npos) {
    if (text.substr(slash + 1) != "2") {
      throw std::invalid_argument("half-integers must use halves, e.g. 3/2; got '" + text + "'");
    }
    const double numerator = parse_number(text.substr(0, slash), "fraction");
    if (numerator != std::floor(numerator)) {
      throw std::invalid_argument("invalid fraction '" + text + "'");
    }
    return static_cast<int>(numerator);
  }
  const double value = parse_number(text, "value");
  const double twice = 2.0 * value;
  if (twice != std::floor(twice)) {
    throw std::invalid_argument("'" + text + "' is not a whole or half integer");
  }
  return static_cast<int>(twice);
}

SpinF parse_spin(const std::string& text) { return SpinF::from_twice(parse_twice_value(text)); }

SublevelIndex parse_sublevel(const std::string& text) {
  return SublevelIndex{parse_twice_value(text)};
}

std::string sublevel_label(SublevelIndex m) {
  const int tm = m.twice_m;
  std::string out = tm > 0 ? "+" : tm < 0 ? "-" : "";
  const int mag = std::abs(tm);
  if (mag % 2 == 0) {
    out += std::to_string(mag / 2);
  } else {
    out += std::to_string(mag) + "/2";
  }
  return out;
}

GridSpec parse_grid(const std::string& text) {
  const std::size_t c1 = text.find(':');
  const std::size_t c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw std::invalid_argument("grid must be start:stop:step, got '" + text + "'");
  }
  GridSpec grid;
  grid.start = parse_number(text.substr(0, c1), "grid start");
  grid.stop = parse_number(text.substr(c1 + 1, c2 - c1 - 1), "grid stop");
  const std::string step_text = text.substr(c2 + 1);
  if (step_text == "auto") {
    grid.auto_step = true;
  } else {
    grid.step = parse_number(step_text, "grid step");
    if (!(grid.step > 0.0)) throw std::invalid_argument("grid step must be positive");
  }
  if (!(grid.stop >= grid.start)) throw std::invalid_argument("grid stop must be >= start");
  return grid;
}

std::vector<double> materialize(const GridSpec& grid) {
  if (grid.auto_step) throw std::logic_error("materialize: auto step not resolved");
  return uniform_grid(grid.start, grid.stop, grid.step);
}

}  // namespace sublevel_sense::cli
