#include "shapelab/csv.hpp"

#include "shapelab/errors.hpp"

#include <fmt/format.h>

namespace shapelab {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw ValidationError("CsvTable: no columns");
}

void CsvTable::meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }

void CsvTable::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_.size()) throw ValidationError("CsvTable: row width does not match the header");
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    if (const auto* s = std::get_if<std::string>(&cells[i]))
      line += csv_escape(*s);
    else if (const auto* d = std::get_if<double>(&cells[i]))
      line += format_double(*d);
    else
      line += std::to_string(std::get<long long>(cells[i]));
  }
  rows_.push_back(std::move(line));
}

std::string CsvTable::text() const {
  std::string out;
  for (const auto& [k, v] : meta_) out += "# " + k + ": " + v + "\r\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + csv_escape(columns_[i]);
  out += "\r\n";
  for (const auto& r : rows_) out += r + "\r\n";
  return out;
}

}  // namespace shapelab
