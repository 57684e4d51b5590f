#pragma once

// Deterministic emission: RFC-4180 CSV at full precision and JSON run
// reports with stable key ordering.

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "holocurve/core.hpp"

namespace holocurve {

using Json = nlohmann::ordered_json;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
  void add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw DomainError("Table: ragged row");
    rows.push_back(std::move(row));
  }
};

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void emit_csv(const Table& table, const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // LF endings on every platform
  if (!os) throw DomainError("emit_csv: cannot open " + path);
  for (size_t i = 0; i < table.header.size(); ++i)
    os << (i ? "," : "") << csv_escape(table.header[i]);
  os << '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << '\n';
  }
  if (!os) throw DomainError("emit_csv: write failure on " + path);
}

struct RunReport {
  std::string subcommand;
  Json inputs;
  Json outputs;
  std::vector<std::pair<std::string, bool>> verdicts;
  double wall_ms = 0.0;

  bool all_pass() const {
    for (const auto& [name, ok] : verdicts)
      if (!ok) return false;
    return true;
  }
  Json to_json(bool include_wall = true) const {
    Json j;
    j["subcommand"] = subcommand;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    Json v = Json::array();
    for (const auto& [name, ok] : verdicts) v.push_back(Json{{"name", name}, {"pass", ok}});
    j["verdicts"] = v;
    j["all_pass"] = all_pass();
    if (include_wall) j["wall_ms"] = wall_ms;
    return j;
  }
  // deterministic payload: wall time excluded
  std::string canonical_string() const { return to_json(false).dump(); }
};

inline void emit_json_report(const RunReport& report, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("emit_json_report: cannot open " + path);
  os << report.to_json().dump(2) << '\n';
  if (!os) throw DomainError("emit_json_report: write failure on " + path);
}

}  // namespace holocurve
