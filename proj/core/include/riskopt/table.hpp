// Rectangular numeric result tables written as CSV with '#' metadata lines:
//
//   # experiment: compare-dist
//   # seed: 42
//   N,0.1,0.5
//   20,11.51,10.71
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace riskopt {

class ResultTable {
 public:
  ResultTable() = default;
  ResultTable(std::string corner, std::vector<std::string> columns);

  /// Throws std::invalid_argument when the row width differs from the
  /// column count or a cell is not finite.
  void add_row(std::string label, std::vector<double> cells);
  void set_meta(const std::string& key, std::string value);
  std::optional<std::string> meta(const std::string& key) const;

  const std::string& corner() const { return corner_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::vector<double>>& cells() const { return cells_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const {
    return meta_;
  }
  std::size_t rows() const { return cells_.size(); }
  double at(std::size_t r, std::size_t c) const { return cells_.at(r).at(c); }

  /// Cells are printed with %.17g so they round-trip exactly.
  void write(std::ostream& os) const;
  void write_file(const std::string& path) const;
  /// Throws std::runtime_error on malformed input.
  static ResultTable read(std::istream& is);
  static ResultTable read_file(const std::string& path);

 private:
  std::string corner_;
  std::vector<std::string> columns_;
  std::vector<std::string> row_labels_;
  std::vector<std::vector<double>> cells_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

/// Shortest %g form that parses back to the same double.
std::string format_double(double v);

}  // namespace riskopt
