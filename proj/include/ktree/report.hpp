#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ktree {

using Cell = std::variant<std::int64_t, double, std::string, bool>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// An assertion made by a run. Informational checks are reported but do not
/// affect the verdict.
struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  bool informational = false;
};

struct Report {
  std::string subcommand;
  nlohmann::json config;
  nlohmann::json summary = nlohmann::json::object();
  std::deque<Table> tables;  // stable references for table()
  std::vector<Check> checks;

  Table& table(const std::string& name, std::vector<std::string> columns);
  void check(std::string name, bool pass, std::string detail = "", bool informational = false);
  bool pass() const;
  /// First failing non-informational check, or nullptr.
  const Check* first_failure() const;
};

/// 12 significant digits, shortest general notation, locale-independent;
/// non-finite values print as inf, -inf, nan.
std::string format_number(double value);
/// The double that format_number(value) denotes.
double round12(double value);

std::string to_csv(const Table& table);
nlohmann::json to_json(const Report& report);
std::string report_json_text(const Report& report);

/// Writes <dir>/<subcommand>.json and/or <dir>/<subcommand>_<table>.csv.
/// format is csv, json or both. Throws Errc::io when the directory or a file
/// cannot be written.
void write_report(const Report& report, const std::string& dir, const std::string& format);

}  // namespace ktree
