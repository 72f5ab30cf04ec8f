#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mcsuite::cli {

using Cell = std::variant<double, long, std::string>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> meta;

  ResultTable() = default;
  explicit ResultTable(std::vector<std::string> cols) : columns(std::move(cols)) {}
  // Throws if the row width does not match the header.
  void add_row(std::vector<Cell> row);
  void add_meta(const std::string& key, Cell value) { meta.emplace_back(key, std::move(value)); }

  bool operator==(const ResultTable& o) const = default;
};

// 17 significant digits.
std::string format_double(double v);

// RFC-4180: CRLF-free rows, fields with comma, quote or newline are quoted.
std::string to_csv(const ResultTable& table);
// {"meta": {...}, "columns": [...], "rows": [[...], ...]}; non-finite reals
// become null.
std::string to_json(const ResultTable& table);
ResultTable from_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace mcsuite::cli
