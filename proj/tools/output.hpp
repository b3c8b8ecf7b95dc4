#pragma once

// Result tables and their CSV / JSON renderings. CSV numbers use 17
// significant digits; missing values are empty fields in CSV and null in JSON.

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace npbcli {

using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

struct Result {
  std::vector<Table> tables;
  /// Multi-table results are written to CSV in long form: table,row,field,value.
  bool long_form = false;
  std::vector<std::pair<std::string, Cell>> summary;
};

std::string format_number(double x);
std::string render_csv(const Result& result, const nlohmann::json& config);
std::string render_json(const Result& result, const nlohmann::json& config);
/// "key: value" lines for standard output.
std::string render_summary(const Result& result);

}  // namespace npbcli
