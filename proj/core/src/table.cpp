#include "riskopt/table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace riskopt {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return full_precision(v);
}

ResultTable::ResultTable(std::string corner, std::vector<std::string> columns)
    : corner_(std::move(corner)), columns_(std::move(columns)) {}

void ResultTable::add_row(std::string label, std::vector<double> cells) {
  if (cells.size() != columns_.size()) {
    throw std::invalid_argument("ResultTable: row width " + std::to_string(cells.size()) +
                                " != " + std::to_string(columns_.size()) + " columns");
  }
  for (double v : cells) {
    if (!std::isfinite(v)) throw std::invalid_argument("ResultTable: non-finite cell");
  }
  row_labels_.push_back(std::move(label));
  cells_.push_back(std::move(cells));
}

void ResultTable::set_meta(const std::string& key, std::string value) {
  for (auto& [k, v] : meta_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  meta_.emplace_back(key, std::move(value));
}

std::optional<std::string> ResultTable::meta(const std::string& key) const {
  for (const auto& [k, v] : meta_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void ResultTable::write(std::ostream& os) const {
  for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << '\n';
  os << corner_;
  for (const auto& c : columns_) os << ',' << c;
  os << '\n';
  for (std::size_t r = 0; r < cells_.size(); ++r) {
    os << row_labels_[r];
    for (double v : cells_[r]) os << ',' << full_precision(v);
    os << '\n';
  }
}

void ResultTable::write_file(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write(os);
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

ResultTable ResultTable::read(std::istream& is) {
  ResultTable t;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon == std::string::npos || colon < 2) {
        throw std::runtime_error("malformed metadata line: " + line);
      }
      t.meta_.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    auto fields = split(line);
    if (!header) {
      if (fields.empty()) throw std::runtime_error("missing header row");
      t.corner_ = fields.front();
      t.columns_.assign(fields.begin() + 1, fields.end());
      header = true;
      continue;
    }
    if (fields.size() != t.columns_.size() + 1) {
      throw std::runtime_error("row width mismatch: " + line);
    }
    std::vector<double> cells;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str() || *end != '\0') {
        throw std::runtime_error("bad numeric cell: " + fields[i]);
      }
      cells.push_back(v);
    }
    t.add_row(fields.front(), std::move(cells));
  }
  if (!header) throw std::runtime_error("empty table");
  return t;
}

ResultTable ResultTable::read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read(is);
}

}  // namespace riskopt
