#include "ktree/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

#include "ktree/io.hpp"

namespace ktree {

using nlohmann::json;

namespace {

constexpr FieldInfo kFields[] = {
    {"k", FieldType::integer, "2", "branching factor of the tree (2..10)"},
    {"support_depth", FieldType::integer, "3", "maximum depth of function supports"},
    {"eval_depth", FieldType::integer, "4", "maximum depth at which operators and norms are evaluated"},
    {"p", FieldType::number, "2.0", "integrability exponent p, 1 < p < 1/alpha"},
    {"alpha", FieldType::number, "0.25", "fractional order alpha in [0, 1)"},
    {"mode", FieldType::text, "\"sobolev\"", "exponent mode: sobolev (1/q = 1/p - alpha) or free"},
    {"q", FieldType::number, "0.0", "target exponent q (free mode only, q >= p)"},
    {"weight.kind", FieldType::text, "\"radial\"", "weight kind: radial, uniform or table"},
    {"weight.beta", FieldType::number, "0.0", "radial weight exponent: w = k^(beta * depth)"},
    {"weight.table", FieldType::text, "\"\"", "JSON weight table path (kind = table)"},
    {"weight2.kind", FieldType::text, "\"radial\"", "second weight v of the two-weight runs"},
    {"weight2.beta", FieldType::number, "0.5", "radial exponent of the second weight"},
    {"weight2.table", FieldType::text, "\"\"", "JSON table path of the second weight"},
    {"seed", FieldType::unsigned_integer, "1", "master seed of every pseudo-random draw"},
    {"radii", FieldType::integer_list, "[0,1,2,3]", "radii r used by zconst, lemma, chain and twoweight"},
    {"threads", FieldType::integer, "1", "worker threads (outputs do not depend on it)"},
    {"output.dir", FieldType::text, "\"ktree-out\"", "directory receiving the report files"},
    {"output.format", FieldType::text, "\"both\"", "report format: csv, json or both"},
    {"output.timings", FieldType::boolean, "false", "record wall-clock milliseconds (breaks byte reproducibility)"},
    {"function.kind", FieldType::text, "\"random\"", "test function: random, zero, delta or file"},
    {"function.path", FieldType::text, "\"\"", "JSON function path (kind = file)"},
    {"function.density", FieldType::number, "0.5", "support density of random functions and sets"},
    {"function.min", FieldType::number, "0.0625", "smallest value of random functions"},
    {"function.max", FieldType::number, "1.0", "largest value of random functions"},
    {"maxfn.mode", FieldType::text, "\"both\"", "maximal operator: sphere, ball or both"},
    {"zconst.method", FieldType::text, "\"both\"", "best-constant search: exhaustive, heuristic or both"},
    {"zconst.region_depth", FieldType::integer, "2", "depth of the search region"},
    {"zconst.starts", FieldType::integer, "16", "seeded random starts of the heuristic"},
    {"certify.j_max", FieldType::integer, "12", "largest level j of the per-level scan"},
    {"certify.r_max", FieldType::integer, "12", "largest radius of the per-level scan"},
    {"certify.grid", FieldType::integer, "100", "number of beta grid points for the exponent inequality"},
    {"geometry.j_max", FieldType::integer, "6", "largest vertex depth of the geometry tables"},
    {"geometry.r_max", FieldType::integer, "8", "largest radius of the geometry tables"},
    {"lemma.instances", FieldType::integer, "60", "number of level-set instances"},
    {"lemma.betas", FieldType::number_list, "[0.1,0.4,0.8]", "dyadic splitting parameters in (0, 1)"},
    {"lemma.quantiles", FieldType::number_list, "[0.0,0.5,0.9]", "quantiles of the average values used as lambda"},
    {"lemma.constant", FieldType::text, "\"certified\"", "class constant: certified, measured or a positive number"},
    {"chain.instances", FieldType::integer, "100", "number of (E, F, r) chain instances"},
    {"scan.family", FieldType::text, "\"deltas\"", "scan family: deltas, level-indicators, random, sphere-indicators"},
    {"scan.depths", FieldType::integer_list, "[4,6,8]", "evaluation depths of the operator-norm scan"},
    {"scan.samples", FieldType::integer, "8", "members of the random scan family"},
    {"twoweight.instances", FieldType::integer, "50", "number of two-weight level-set instances"},
};

[[noreturn]] void bad_field(const std::string& name, const std::string& what) {
  fail(Errc::invalid_config, "field '" + name + "': " + what);
}

bool type_matches(FieldType type, const json& v) {
  switch (type) {
    case FieldType::integer: return v.is_number_integer();
    case FieldType::unsigned_integer: return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case FieldType::number: return v.is_number();
    case FieldType::text: return v.is_string();
    case FieldType::boolean: return v.is_boolean();
    case FieldType::integer_list:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_integer(); });
    case FieldType::number_list:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
  }
  return false;
}

const char* type_name(FieldType type) {
  switch (type) {
    case FieldType::integer: return "an integer";
    case FieldType::unsigned_integer: return "a nonnegative integer";
    case FieldType::number: return "a number";
    case FieldType::text: return "a string";
    case FieldType::boolean: return "a boolean";
    case FieldType::integer_list: return "a list of integers";
    case FieldType::number_list: return "a list of numbers";
  }
  return "a value";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<json> parse_scalar(FieldType type, const std::string& raw) {
  const std::string s = trim(raw);
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (s.empty()) return std::nullopt;
  switch (type) {
    case FieldType::integer: {
      long long v = 0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) return std::nullopt;
      return json(v);
    }
    case FieldType::unsigned_integer: {
      unsigned long long v = 0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) return std::nullopt;
      return json(v);
    }
    case FieldType::number: {
      double v = 0.0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last || !std::isfinite(v)) return std::nullopt;
      return json(v);
    }
    default: return std::nullopt;
  }
}

void flatten(const json& doc, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (const auto& item : doc.items()) {
    const std::string name = prefix.empty() ? item.key() : prefix + "." + item.key();
    if (item.value().is_object())
      flatten(item.value(), name, out);
    else
      out.emplace_back(name, item.value());
  }
}

void require_one_of(const std::string& name, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  bad_field(name, "'" + value + "' is not one of " + list);
}

}  // namespace

std::span<const FieldInfo> config_fields() { return kFields; }

const FieldInfo& field_info(const std::string& name) {
  for (const auto& f : kFields)
    if (name == f.name) return f;
  fail(Errc::invalid_config, "unknown field '" + name + "'");
}

ExperimentConfig::ExperimentConfig() {
  for (const auto& f : kFields) values_[f.name] = json::parse(f.default_value);
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  if (!doc.is_object()) fail(Errc::invalid_config, "configuration must be a JSON object");
  ExperimentConfig cfg;
  std::vector<std::pair<std::string, json>> flat;
  flatten(doc, "", flat);
  for (const auto& [name, value] : flat) cfg.set_json(name, value);
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) { return from_json(read_json_file(path)); }

void ExperimentConfig::set_json(const std::string& name, const json& value) {
  const FieldInfo& info = field_info(name);
  if (!type_matches(info.type, value)) bad_field(name, std::string("expected ") + type_name(info.type));
  json stored = value;
  if (info.type == FieldType::number) stored = value.get<double>();
  if (info.type == FieldType::unsigned_integer) stored = value.get<std::uint64_t>();
  if (info.type == FieldType::number_list) {
    stored = json::array();
    for (const auto& e : value) stored.push_back(e.get<double>());
  }
  values_[name] = stored;
}

void ExperimentConfig::set_text(const std::string& name, const std::string& text) {
  const FieldInfo& info = field_info(name);
  const std::string s = trim(text);
  switch (info.type) {
    case FieldType::text: set_json(name, json(text)); return;
    case FieldType::boolean:
      if (s == "true" || s == "1") return set_json(name, json(true));
      if (s == "false" || s == "0") return set_json(name, json(false));
      bad_field(name, "expected true or false, got '" + text + "'");
    case FieldType::integer_list:
    case FieldType::number_list: {
      if (!s.empty() && s.front() == '[') {
        json parsed;
        try {
          parsed = json::parse(s);
        } catch (const json::exception&) {
          bad_field(name, "malformed list '" + text + "'");
        }
        return set_json(name, parsed);
      }
      const FieldType elem = info.type == FieldType::integer_list ? FieldType::integer : FieldType::number;
      json list = json::array();
      std::size_t start = 0;
      while (start <= s.size() && !s.empty()) {
        const auto comma = s.find(',', start);
        const std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        auto v = parse_scalar(elem, part);
        if (!v) bad_field(name, "cannot parse list element '" + part + "'");
        list.push_back(*v);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return set_json(name, list);
    }
    default: {
      auto v = parse_scalar(info.type, s);
      if (!v) bad_field(name, std::string("expected ") + type_name(info.type) + ", got '" + text + "'");
      return set_json(name, *v);
    }
  }
}

const json& ExperimentConfig::get(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) fail(Errc::invalid_config, "unknown field '" + name + "'");
  return it->second;
}

json ExperimentConfig::to_json() const {
  json doc = json::object();
  for (const auto& f : kFields) {
    std::string pointer = std::string("/") + f.name;
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    doc[json::json_pointer(pointer)] = get(f.name);
  }
  return doc;
}

int ExperimentConfig::integer(const std::string& name) const {
  const auto v = get(name).get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) bad_field(name, "out of range");
  return static_cast<int>(v);
}
std::uint64_t ExperimentConfig::unsigned_integer(const std::string& name) const { return get(name).get<std::uint64_t>(); }
double ExperimentConfig::number(const std::string& name) const { return get(name).get<double>(); }
std::string ExperimentConfig::text(const std::string& name) const { return get(name).get<std::string>(); }
bool ExperimentConfig::boolean(const std::string& name) const { return get(name).get<bool>(); }

std::vector<int> ExperimentConfig::integers(const std::string& name) const {
  std::vector<int> out;
  for (const auto& e : get(name)) {
    const auto v = e.get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) bad_field(name, "out of range");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<double> ExperimentConfig::numbers(const std::string& name) const {
  std::vector<double> out;
  for (const auto& e : get(name)) out.push_back(e.get<double>());
  return out;
}

TreeParams ExperimentConfig::tree_params() const {
  return TreeParams{integer("k"), integer("support_depth"), integer("eval_depth")};
}

ExponentConfig ExperimentConfig::exponents() const {
  const std::string mode = text("mode");
  require_one_of("mode", mode, {"sobolev", "free"});
  const double p = number("p");
  const double alpha = number("alpha");
  if (!(alpha > 0.0 && alpha < 1.0)) bad_field("alpha", "must lie in (0, 1)");
  if (!(p > 1.0)) bad_field("p", "must be > 1");
  if (!(p < 1.0 / alpha)) bad_field("p", "must be < 1/alpha");
  const bool free = mode == "free";
  if (free && !(number("q") >= p)) bad_field("q", "free mode requires q >= p");
  return derived_exponents(integer("k"), p, alpha, free ? ExponentMode::free : ExponentMode::sobolev, number("q"));
}

Weight ExperimentConfig::weight(const std::string& prefix) const {
  const std::string kind = text(prefix + ".kind");
  const int k = integer("k");
  if (kind == "uniform") return Weight::uniform(k);
  if (kind == "radial") return Weight::radial(k, number(prefix + ".beta"));
  const std::string path = text(prefix + ".table");
  Weight w = weight_from_json(read_json_file(path));
  if (w.k() != k) bad_field(prefix + ".table", "table branching factor differs from k");
  if (w.depth_limit() < integer("eval_depth")) bad_field(prefix + ".table", "table does not cover eval_depth");
  return w;
}

void ExperimentConfig::validate() const {
  const int k = integer("k");
  if (k < 2 || k > kMaxBranching) bad_field("k", "must lie in [2, " + std::to_string(kMaxBranching) + "]");
  const int D = integer("support_depth");
  const int De = integer("eval_depth");
  if (D < 0) bad_field("support_depth", "must be >= 0");
  if (De < D) bad_field("eval_depth", "must be >= support_depth");
  try {
    if (region_size(k, De) > 4'000'000) bad_field("eval_depth", "evaluation region exceeds 4e6 vertices");
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_config) throw;
    bad_field("eval_depth", "evaluation region size overflows");
  }
  (void)exponents();

  for (const char* prefix : {"weight", "weight2"}) {
    const std::string p = prefix;
    const std::string kind = text(p + ".kind");
    require_one_of(p + ".kind", kind, {"radial", "uniform", "table"});
    if (kind == "radial" && !(number(p + ".beta") >= 0.0)) bad_field(p + ".beta", "must be >= 0");
    if (kind == "table" && text(p + ".table").empty()) bad_field(p + ".table", "required when kind = table");
  }

  if (integer("threads") < 1) bad_field("threads", "must be >= 1");
  const auto radii = integers("radii");
  if (radii.empty()) bad_field("radii", "must not be empty");
  for (int r : radii)
    if (r < 0 || r > 60) bad_field("radii", "radii must lie in [0, 60]");

  require_one_of("output.format", text("output.format"), {"csv", "json", "both"});
  if (text("output.dir").empty()) bad_field("output.dir", "must not be empty");

  const std::string fkind = text("function.kind");
  require_one_of("function.kind", fkind, {"random", "zero", "delta", "file"});
  if (fkind == "file" && text("function.path").empty()) bad_field("function.path", "required when kind = file");
  const double density = number("function.density");
  if (!(density > 0.0 && density <= 1.0)) bad_field("function.density", "must lie in (0, 1]");
  const double lo = number("function.min");
  const double hi = number("function.max");
  if (!(lo > 0.0)) bad_field("function.min", "must be > 0");
  if (!(hi >= lo)) bad_field("function.max", "must be >= function.min");

  require_one_of("maxfn.mode", text("maxfn.mode"), {"sphere", "ball", "both"});
  require_one_of("zconst.method", text("zconst.method"), {"exhaustive", "heuristic", "both"});
  if (integer("zconst.region_depth") < 0) bad_field("zconst.region_depth", "must be >= 0");
  if (integer("zconst.starts") < 0) bad_field("zconst.starts", "must be >= 0");

  for (const char* f : {"certify.j_max", "certify.r_max", "geometry.j_max", "geometry.r_max"})
    if (integer(f) < 0 || integer(f) > 40) bad_field(f, "must lie in [0, 40]");
  if (integer("certify.grid") < 1) bad_field("certify.grid", "must be >= 1");

  for (const char* f : {"lemma.instances", "chain.instances", "twoweight.instances", "scan.samples"})
    if (integer(f) < 0) bad_field(f, "must be >= 0");
  const auto betas = numbers("lemma.betas");
  if (betas.empty()) bad_field("lemma.betas", "must not be empty");
  for (double b : betas)
    if (!(b > 0.0 && b < 1.0)) bad_field("lemma.betas", "values must lie in (0, 1)");
  const auto quantiles = numbers("lemma.quantiles");
  if (quantiles.empty()) bad_field("lemma.quantiles", "must not be empty");
  for (double q : quantiles)
    if (!(q >= 0.0 && q <= 1.0)) bad_field("lemma.quantiles", "values must lie in [0, 1]");
  const std::string constant = text("lemma.constant");
  if (constant != "certified" && constant != "measured") {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(constant.data(), constant.data() + constant.size(), v);
    if (ec != std::errc() || ptr != constant.data() + constant.size() || !(v > 0.0) || !std::isfinite(v))
      bad_field("lemma.constant", "expected certified, measured or a positive number");
  }

  require_one_of("scan.family", text("scan.family"),
                 {"deltas", "level-indicators", "random", "sphere-indicators"});
  const auto depths = integers("scan.depths");
  if (depths.empty()) bad_field("scan.depths", "must not be empty");
  if (!std::is_sorted(depths.begin(), depths.end())) bad_field("scan.depths", "must be ascending");
  for (int d : depths)
    if (d < D) bad_field("scan.depths", "every depth must be >= support_depth");
}

}  // namespace ktree
