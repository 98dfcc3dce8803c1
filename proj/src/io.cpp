#include "ktree/io.hpp"

#include <fstream>
#include <sstream>

namespace ktree {

using nlohmann::json;

namespace {

int require_int(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number_integer())
    fail(Errc::invalid_config, std::string("missing integer field '") + key + "'");
  return doc.at(key).get<int>();
}

const json& require_object(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_object())
    fail(Errc::invalid_config, std::string("missing object field '") + key + "'");
  return doc.at(key);
}

void reject_unknown(const json& doc, std::initializer_list<const char*> allowed) {
  if (!doc.is_object()) fail(Errc::invalid_config, "expected a JSON object");
  for (const auto& item : doc.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) fail(Errc::invalid_config, "unknown field '" + item.key() + "'");
  }
}

double require_number(const json& value, const std::string& key) {
  if (!value.is_number()) fail(Errc::invalid_config, "value for '" + key + "' is not a number");
  return value.get<double>();
}

}  // namespace

TreeFunction function_from_json(const json& doc) {
  reject_unknown(doc, {"k", "depth", "values"});
  const int k = require_int(doc, "k");
  const int depth = require_int(doc, "depth");
  TreeFunction f(k, depth);
  for (const auto& item : require_object(doc, "values").items()) {
    const VertexId v = f.tree().parse_path(item.key());
    f.set(v, require_number(item.value(), item.key()));
  }
  return f;
}

json function_to_json(const TreeFunction& f) {
  json values = json::object();
  for (VertexId v : f.support()) values[f.tree().path_string(v)] = f(v);
  return json{{"k", f.k()}, {"depth", f.max_depth()}, {"values", values}};
}

Weight weight_from_json(const json& doc) {
  reject_unknown(doc, {"k", "depth", "values"});
  const int k = require_int(doc, "k");
  const int depth = require_int(doc, "depth");
  const Tree tree(k);
  std::vector<double> dense(region_size(k, depth), 0.0);
  for (const auto& item : require_object(doc, "values").items()) {
    const VertexId v = tree.parse_path(item.key());
    if (v.depth > depth) fail(Errc::invalid_config, "weight entry '" + item.key() + "' deeper than table depth");
    dense[tree.dense_index(v)] = require_number(item.value(), item.key());
  }
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (!(dense[i] > 0.0))
      fail(Errc::invalid_config, "weight table lacks a positive entry for " + tree.path_string(tree.vertex_at(i)));
  return Weight::tabulated(k, depth, std::move(dense));
}

VertexSet set_from_json(const json& doc) {
  reject_unknown(doc, {"k", "vertices"});
  const int k = require_int(doc, "k");
  if (!doc.contains("vertices") || !doc.at("vertices").is_array())
    fail(Errc::invalid_config, "missing array field 'vertices'");
  const Tree tree(k);
  std::vector<VertexId> out;
  for (const auto& item : doc.at("vertices")) {
    if (!item.is_string()) fail(Errc::invalid_config, "vertex entries must be strings");
    out.push_back(tree.parse_path(item.get<std::string>()));
  }
  return make_vertex_set(std::move(out));
}

json set_to_json(int k, const VertexSet& set) {
  const Tree tree(k);
  json vertices = json::array();
  for (VertexId v : set) vertices.push_back(tree.path_string(v));
  return json{{"k", k}, {"vertices", vertices}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::exception& e) {
    fail(Errc::invalid_config, "malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace ktree
