#include <doctest.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <set>

#include "ktree/config.hpp"

using namespace ktree;
using nlohmann::json;

namespace {

Errc code_of(const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::domain;
}

}  // namespace

TEST_CASE("defaults validate and echo") {
  const ExperimentConfig c;
  c.validate();
  CHECK(c.integer("k") == 2);
  CHECK(c.number("p") == 2.0);
  CHECK(c.text("mode") == "sobolev");
  CHECK(c.integers("radii") == std::vector<int>{0, 1, 2, 3});
  const json doc = c.to_json();
  CHECK(doc["weight"]["beta"] == 0.0);
  CHECK(doc["output"]["format"] == "both");
  CHECK(ExperimentConfig::from_json(doc).to_json() == doc);
}

TEST_CASE("every field has a default that parses") {
  std::set<std::string> names;
  for (const FieldInfo& f : config_fields()) {
    CHECK(names.insert(f.name).second);
    CHECK_FALSE(std::string(f.help).empty());
    const ExperimentConfig c;
    CHECK(c.get(f.name) == json::parse(f.default_value));
    CHECK(field_info(f.name).name == std::string(f.name));
  }
  CHECK(code_of([] { field_info("nope"); }) == Errc::invalid_config);
}

TEST_CASE("text overrides follow the field type") {
  ExperimentConfig c;
  c.set_text("weight.beta", "0.5");
  c.set_text("radii", "1,2,5");
  c.set_text("lemma.betas", "[0.2, 0.3]");
  c.set_text("output.timings", "true");
  c.set_text("seed", "18446744073709551615");
  CHECK(c.number("weight.beta") == 0.5);
  CHECK(c.integers("radii") == std::vector<int>{1, 2, 5});
  CHECK(c.numbers("lemma.betas") == std::vector<double>{0.2, 0.3});
  CHECK(c.boolean("output.timings"));
  CHECK(c.unsigned_integer("seed") == 18446744073709551615ULL);
  CHECK(code_of([&] { c.set_text("k", "two"); }) == Errc::invalid_config);
  CHECK(code_of([&] { c.set_text("k", "2.5"); }) == Errc::invalid_config);
  CHECK(code_of([&] { c.set_text("radii", "1,,2"); }) == Errc::invalid_config);
  CHECK(code_of([&] { c.set_text("unknown.field", "1"); }) == Errc::invalid_config);
}

TEST_CASE("unknown and mistyped JSON fields are rejected") {
  CHECK(code_of([] { ExperimentConfig::from_json(json::parse(R"({"kk": 2})")); }) == Errc::invalid_config);
  CHECK(code_of([] { ExperimentConfig::from_json(json::parse(R"({"weight": {"bogus": 1}})")); }) == Errc::invalid_config);
  CHECK(code_of([] { ExperimentConfig::from_json(json::parse(R"({"p": "two"})")); }) == Errc::invalid_config);
  const auto c = ExperimentConfig::from_json(json::parse(R"({"k": 3, "weight": {"beta": 0.25}})"));
  CHECK(c.integer("k") == 3);
  CHECK(c.number("weight.beta") == 0.25);
  CHECK(c.number("p") == 2.0);
}

TEST_CASE("cross-field validation names the field") {
  auto message = [](const std::function<void(ExperimentConfig&)>& edit) {
    ExperimentConfig c;
    edit(c);
    try {
      c.validate();
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_config);
      return std::string(e.what());
    }
    return std::string("valid");
  };
  CHECK(message([](auto& c) { c.set_text("alpha", "1.2"); }).find("'alpha'") != std::string::npos);
  CHECK(message([](auto& c) { c.set_text("p", "5"); }).find("'p'") != std::string::npos);
  CHECK(message([](auto& c) { c.set_text("eval_depth", "1"); }).find("'eval_depth'") != std::string::npos);
  CHECK(message([](auto& c) { c.set_text("k", "1"); }).find("'k'") != std::string::npos);
  CHECK(message([](auto& c) { c.set_text("mode", "free"); c.set_text("q", "1.5"); }).find("'q'") != std::string::npos);
  CHECK(message([](auto& c) { c.set_text("weight.kind", "table"); }).find("'weight.table'") != std::string::npos);
  CHECK(message([](auto& c) { c.set_text("lemma.betas", "0,0.5"); }).find("'lemma.betas'") != std::string::npos);
  CHECK(message([](auto& c) { c.set_text("lemma.constant", "abc"); }).find("'lemma.constant'") != std::string::npos);
  CHECK(message([](auto& c) { c.set_text("scan.depths", "6,4"); }).find("'scan.depths'") != std::string::npos);
  CHECK(message([](auto& c) { c.set_text("output.format", "xml"); }).find("'output.format'") != std::string::npos);
  CHECK(message([](auto& c) { c.set_text("lemma.constant", "2.5"); }) == "valid");
}

TEST_CASE("derived values") {
  ExperimentConfig c;
  c.set_text("k", "3");
  c.set_text("weight.beta", "0.5");
  const ExponentConfig e = c.exponents();
  CHECK(e.k == 3);
  CHECK(e.q == 4.0);
  CHECK(c.tree_params().eval_depth == 4);
  CHECK(c.weight().is_radial());
  CHECK(c.weight().beta() == 0.5);
  CHECK(c.weight("weight2").beta() == 0.5);
  c.set_text("weight.kind", "uniform");
  CHECK(c.weight().beta() == 0.0);
}

TEST_CASE("config files") {
  const auto dir = std::filesystem::temp_directory_path() / "ktree_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / "c.json";
  std::ofstream(path) << R"({"k": 3, "radii": [1, 2]})";
  const auto c = ExperimentConfig::from_file(path.string());
  CHECK(c.integer("k") == 3);
  CHECK(code_of([&] { ExperimentConfig::from_file((dir / "missing.json").string()); }) == Errc::io);

  const auto wpath = dir / "w.json";
  std::ofstream(wpath) << R"({"k":2,"depth":1,"values":{"0,":1,"1,0":2,"1,1":3}})";
  ExperimentConfig t;
  t.set_text("support_depth", "1");
  t.set_text("eval_depth", "1");
  t.set_text("weight.kind", "table");
  t.set_text("weight.table", wpath.string());
  CHECK_FALSE(t.weight().is_radial());
  CHECK(t.weight()(VertexId{1, 1}) == 3.0);
}
