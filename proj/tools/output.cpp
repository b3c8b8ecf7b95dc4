#include "output.hpp"

#include <cmath>
#include <cstdio>

#include "npbayes/npbayes.h"

namespace npbcli {

namespace {

using nlohmann::json;

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double x) const { return std::isnan(x) ? "" : format_number(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(std::uint64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return quote(s); }
  };
  return std::visit(Visitor{}, c);
}

json json_cell(const Cell& c) {
  struct Visitor {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(double x) const {
      if (std::isnan(x)) return nullptr;
      if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
      return x;
    }
    json operator()(std::int64_t x) const { return x; }
    json operator()(std::uint64_t x) const { return x; }
    json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

void line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string render_csv(const Result& result, const json& config) {
  std::string out;
  out += std::string("# npbayes ") + npb_version() + "\n";
  if (config.contains("seed")) out += "# seed: " + config["seed"].dump() + "\n";
  out += "# config: " + config.dump() + "\n";
  if (result.long_form) {
    line(out, {"table", "row", "field", "value"});
    for (const auto& t : result.tables) {
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
          line(out, {quote(t.name), std::to_string(r), quote(t.columns[c]), csv_cell(t.rows[r][c])});
        }
      }
    }
    return out;
  }
  for (const auto& t : result.tables) {
    std::vector<std::string> header;
    for (const auto& c : t.columns) header.push_back(quote(c));
    line(out, header);
    for (const auto& row : t.rows) {
      std::vector<std::string> fields;
      for (const auto& c : row) fields.push_back(csv_cell(c));
      line(out, fields);
    }
  }
  return out;
}

std::string render_json(const Result& result, const json& config) {
  json tables = json::object();
  for (const auto& t : result.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json r = json::array();
      for (const auto& c : row) r.push_back(json_cell(c));
      rows.push_back(std::move(r));
    }
    tables[t.name] = {{"columns", t.columns}, {"rows", std::move(rows)}};
  }
  json summary = json::object();
  for (const auto& [k, v] : result.summary) summary[k] = json_cell(v);
  json doc = {{"npbayes", npb_version()}, {"config", config}, {"summary", summary}, {"tables", tables}};
  if (config.contains("seed")) doc["seed"] = config["seed"];
  return doc.dump(2) + "\n";
}

std::string render_summary(const Result& result) {
  std::string out;
  for (const auto& [k, v] : result.summary) {
    const std::string text = std::holds_alternative<std::string>(v) ? std::get<std::string>(v) : csv_cell(v);
    out += k + ": " + (text.empty() ? "nan" : text) + "\n";
  }
  return out;
}

}  // namespace npbcli
