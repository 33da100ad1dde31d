#include "csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace sublevel_sense::cli {

void CsvWriter::row(std::vector<Cell> cells) {
  if (cells.size() != header_.size()) {
    throw std::logic_error("CsvWriter: row width does not match the header");
  }
  rows_.push_back(std::move(cells));
}

std::string CsvWriter::format(double value) const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision_, value);
  return buf;
}

void CsvWriter::write(const std::string& path) const {
  const std::filesystem::path target(path);
  const std::filesystem::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot open output file: " + temp.string());
    for (const std::string& c : comments_) out << "# " << c << "\n";
    for (std::size_t i = 0; i < header_.size(); ++i) {
      out << header_[i] << (i + 1 < header_.size() ? "," : "\n");
    }
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (const double* d = std::get_if<double>(&row[i])) {
          out << format(*d);
        } else if (const long long* n = std::get_if<long long>(&row[i])) {
          out << *n;
        } else {
          out << std::get<std::string>(row[i]);
        }
        out << (i + 1 < row.size() ? "," : "\n");
      }
    }
    if (!out) {
      out.close();
      std::filesystem::remove(temp);
      throw std::runtime_error("failed while writing " + temp.string());
    }
  }
  std::filesystem::rename(temp, target);
}

}  // namespace sublevel_sense::cli
