#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace shapelab {

/// RFC 4180 table preceded by `# key: value` comment lines. Cells are
/// formatted on insertion (doubles with 17 significant digits), so equal
/// inputs give byte-identical text.
class CsvTable {
 public:
  using Cell = std::variant<std::string, double, long long>;

  explicit CsvTable(std::vector<std::string> columns);

  void meta(const std::string& key, const std::string& value);
  void row(const std::vector<Cell>& cells);

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  std::string text() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> rows_;
};

std::string csv_escape(const std::string& field);
std::string format_double(double x);

}  // namespace shapelab
