#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ktree/function.hpp"
#include "ktree/weight_class.hpp"

namespace ktree {

enum class FieldType { integer, unsigned_integer, number, text, boolean, integer_list, number_list };

struct FieldInfo {
  const char* name;  // dotted path, e.g. "weight.beta"
  FieldType type;
  const char* default_value;  // JSON literal
  const char* help;
};

/// Every configuration field in a fixed order. The CLI derives one flag per entry.
std::span<const FieldInfo> config_fields();

/// Experiment configuration: a flat map from dotted field names to JSON values,
/// initialised with the defaults of config_fields(). Unknown fields and values
/// of the wrong type are rejected with Errc::invalid_config.
class ExperimentConfig {
public:
  ExperimentConfig();

  /// Nested JSON document; missing fields keep their defaults.
  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig from_file(const std::string& path);

  void set_json(const std::string& name, const nlohmann::json& value);
  /// Parses command-line text according to the field type. Lists are
  /// comma-separated ("0,1,2") or JSON arrays.
  void set_text(const std::string& name, const std::string& text);

  const nlohmann::json& get(const std::string& name) const;
  /// Nested document containing every field (round-trips through from_json).
  nlohmann::json to_json() const;

  int integer(const std::string& name) const;
  std::uint64_t unsigned_integer(const std::string& name) const;
  double number(const std::string& name) const;
  std::string text(const std::string& name) const;
  bool boolean(const std::string& name) const;
  std::vector<int> integers(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;

  /// Cross-field validation; throws Errc::invalid_config naming the field.
  void validate() const;

  ExponentConfig exponents() const;
  TreeParams tree_params() const;
  /// "weight" or "weight2".
  Weight weight(const std::string& prefix = "weight") const;

private:
  std::map<std::string, nlohmann::json> values_;
};

const FieldInfo& field_info(const std::string& name);

}  // namespace ktree
