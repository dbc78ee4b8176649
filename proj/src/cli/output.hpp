#pragma once

// Plot-ready tables for the command-line front end: fixed columns, CSV or JSON.

#include <string>
#include <utility>
#include <deque>
#include <variant>
#include <vector>

namespace delta2d::cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

enum class Format { csv, json };

struct Report {
  std::string command;
  std::vector<std::pair<std::string, Cell>> meta;  ///< run parameters, in insertion order
  std::deque<Table> tables;  ///< deque: references from table() stay valid

  Table& table(std::string name, std::vector<std::string> columns);
};

Format parse_format(const std::string& s);

/// CSV: one block per table, introduced by "# table: <name>", then a header row.
/// JSON: {"command", "meta": {...}, "tables": {name: [{column: value}, ...]}}.
std::string render(const Report& report, Format format);

/// Write through a temporary file in the target directory and rename over the target.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace delta2d::cli
