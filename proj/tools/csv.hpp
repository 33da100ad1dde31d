#pragma once

#include <string>
#include <variant>
#include <vector>

namespace sublevel_sense::cli {

/// Accumulates comment lines, one header row, and numeric/text data rows,
/// then writes everything atomically (temp file + rename) so a failed run
/// never leaves a partial CSV behind.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit CsvWriter(int precision) : precision_(precision) {}

  void comment(const std::string& line) { comments_.push_back(line); }
  void header(std::vector<std::string> names) { header_ = std::move(names); }
  void row(std::vector<Cell> cells);

  std::size_t row_count() const { return rows_.size(); }

  /// Formats one value the way data cells are written ("%.*g").
  std::string format(double value) const;

  void write(const std::string& path) const;

 private:
  int precision_;
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace sublevel_sense::cli
