#pragma once

// JSON literals for functions, weights and vertex sets.
//
//   function: {"k":2,"depth":4,"values":{"0,":1.0,"2,01":0.5}}
//   weight:   {"k":2,"depth":4,"values":{...}}     every vertex of depth <= depth
//   set:      {"k":2,"vertices":["0,","1,1"]}
//
// Vertices are "depth,digits" with one decimal digit per level.

#include <string>

#include <json.hpp>

#include "ktree/function.hpp"

namespace ktree {

TreeFunction function_from_json(const nlohmann::json& doc);
nlohmann::json function_to_json(const TreeFunction& f);

Weight weight_from_json(const nlohmann::json& doc);

VertexSet set_from_json(const nlohmann::json& doc);
nlohmann::json set_to_json(int k, const VertexSet& set);

/// Reads and parses a JSON file; Errc::io on unreadable files, Errc::invalid_config
/// on malformed JSON.
nlohmann::json read_json_file(const std::string& path);

}  // namespace ktree
