#include "ktree/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ktree/error.hpp"

namespace ktree {

using nlohmann::json;

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>)
          return format_number(v);
        else if constexpr (std::is_same_v<T, bool>)
          return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>)
          return v;
        else
          return std::to_string(v);
      },
      cell);
}

json number_json(double v) {
  if (std::isfinite(v)) return round12(v);
  return format_number(v);
}

json cell_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>)
          return number_json(v);
        else
          return json(v);
      },
      cell);
}

// Rounds every floating value of a JSON document to 12 significant digits.
json rounded(const json& doc) {
  if (doc.is_number_float()) return number_json(doc.get<double>());
  if (doc.is_array()) {
    json out = json::array();
    for (const auto& e : doc) out.push_back(rounded(e));
    return out;
  }
  if (doc.is_object()) {
    json out = json::object();
    for (const auto& item : doc.items()) out[item.key()] = rounded(item.value());
    return out;
  }
  return doc;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io, "cannot write '" + path.string() + "'");
  out << text;
  out.close();
  if (!out) fail(Errc::io, "cannot write '" + path.string() + "'");
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) fail(Errc::domain, "row width does not match table '" + name + "'");
  rows.push_back(std::move(row));
}

Table& Report::table(const std::string& name, std::vector<std::string> columns) {
  tables.push_back(Table{name, std::move(columns), {}});
  return tables.back();
}

void Report::check(std::string name, bool pass, std::string detail, bool informational) {
  checks.push_back(Check{std::move(name), pass, std::move(detail), informational});
}

bool Report::pass() const { return first_failure() == nullptr; }

const Check* Report::first_failure() const {
  for (const auto& c : checks)
    if (!c.pass && !c.informational) return &c;
  return nullptr;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

double round12(double value) {
  if (!std::isfinite(value) || value == 0.0) return value == 0.0 ? 0.0 : value;
  const std::string text = format_number(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + csv_field(table.columns[c]);
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_field(cell_text(row[c]));
    out += "\n";
  }
  return out;
}

json to_json(const Report& report) {
  json doc;
  doc["subcommand"] = report.subcommand;
  doc["config"] = report.config;
  doc["summary"] = rounded(report.summary);
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"informational", c.informational}});
  doc["checks"] = checks;
  doc["pass"] = report.pass();
  json tables = json::object();
  for (const auto& t : report.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json r = json::array();
      for (const auto& cell : row) r.push_back(cell_json(cell));
      rows.push_back(r);
    }
    tables[t.name] = {{"columns", t.columns}, {"rows", rows}};
  }
  doc["tables"] = tables;
  return doc;
}

std::string report_json_text(const Report& report) { return to_json(report).dump(2) + "\n"; }

void write_report(const Report& report, const std::string& dir, const std::string& format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(Errc::io, "cannot create output directory '" + dir + "'");
  const bool csv = format == "csv" || format == "both";
  const bool js = format == "json" || format == "both";
  if (!csv && !js) fail(Errc::invalid_config, "unknown output format '" + format + "'");
  if (js) write_file(fs::path(dir) / (report.subcommand + ".json"), report_json_text(report));
  if (csv)
    for (const auto& t : report.tables) write_file(fs::path(dir) / (report.subcommand + "_" + t.name + ".csv"), to_csv(t));
}

}  // namespace ktree
