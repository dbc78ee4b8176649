#include "cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

#include "delta2d/errors.hpp"

namespace delta2d::cli {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);  // JSON has no NaN/inf literals
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::logic_error("Table '" + name + "': row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

Table& Report::table(std::string name, std::vector<std::string> columns) {
  tables.push_back({std::move(name), std::move(columns), {}});
  return tables.back();
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw input_format_error("unknown output format '" + s + "' (expected csv or json)");
}

std::string render(const Report& report, Format format) {
  if (format == Format::json) {
    nlohmann::ordered_json j;
    j["command"] = report.command;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.meta) j["meta"][k] = json_cell(v);
    j["tables"] = nlohmann::ordered_json::object();
    for (const auto& t : report.tables) {
      auto rows = nlohmann::ordered_json::array();
      for (const auto& r : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t c = 0; c < t.columns.size(); ++c) obj[t.columns[c]] = json_cell(r[c]);
        rows.push_back(std::move(obj));
      }
      j["tables"][t.name] = std::move(rows);
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "# command: " << report.command << "\n";
  for (const auto& [k, v] : report.meta) out << "# " << k << ": " << csv_cell(v) << "\n";
  for (const auto& t : report.tables) {
    out << "# table: " << t.name << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
    out << "\n";
    for (const auto& r : t.rows) {
      for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << csv_cell(r[c]);
      out << "\n";
    }
  }
  return out.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into '" + path + "': " + ec.message());
  }
}

}  // namespace delta2d::cli
