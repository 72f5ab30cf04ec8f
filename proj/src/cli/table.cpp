#include "table.hpp"

#include "mcsuite/core.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace mcsuite::cli {

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorKind::kInvalidInput, "result table: row has " + std::to_string(row.size()) +
                                              " cells, header has " +
                                              std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long* l = std::get_if<long>(&c)) return std::to_string(*l);
  return std::get<std::string>(c);
}

std::string json_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return "null";
    std::string s = format_double(*d);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  }
  if (const long* l = std::get_if<long>(&c)) return std::to_string(*l);
  return nlohmann::json(std::get<std::string>(c)).dump();
}

Cell cell_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_number_integer()) return static_cast<long>(j.get<long long>());
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error(ErrorKind::kIo, "result json: unsupported value " + j.dump());
}

}  // namespace

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? "," : "") + csv_field(table.columns[i]);
  }
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(cell_text(row[i]));
    out += "\n";
  }
  return out;
}

std::string to_json(const ResultTable& table) {
  std::string out = "{\"meta\": {";
  for (std::size_t i = 0; i < table.meta.size(); ++i) {
    out += (i ? ", " : "") + nlohmann::json(table.meta[i].first).dump() + ": " +
           json_cell(table.meta[i].second);
  }
  out += "}, \"columns\": [";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? ", " : "") + nlohmann::json(table.columns[i]).dump();
  }
  out += "], \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += r ? ",\n  [" : "\n  [";
    for (std::size_t i = 0; i < table.rows[r].size(); ++i) {
      out += (i ? ", " : "") + json_cell(table.rows[r][i]);
    }
    out += "]";
  }
  out += table.rows.empty() ? "]}\n" : "\n]}\n";
  return out;
}

ResultTable from_json(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  ResultTable t;
  for (const auto& c : j.at("columns")) t.columns.push_back(c.get<std::string>());
  for (const auto& [k, v] : j.at("meta").items()) t.meta.emplace_back(k, cell_from_json(v));
  for (const auto& row : j.at("rows")) {
    std::vector<Cell> cells;
    for (const auto& v : row) cells.push_back(cell_from_json(v));
    t.add_row(std::move(cells));
  }
  return t;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error(ErrorKind::kIo, "write failed for " + path);
}

}  // namespace mcsuite::cli
