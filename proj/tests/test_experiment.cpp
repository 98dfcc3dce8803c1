#include <doctest.h>

#include <string>
#include <vector>

#include "ktree/experiment.hpp"

using namespace ktree;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.set_text("support_depth", "2");
  c.set_text("eval_depth", "3");
  c.set_text("lemma.instances", "12");
  c.set_text("twoweight.instances", "6");
  c.set_text("chain.instances", "10");
  c.set_text("certify.j_max", "6");
  c.set_text("certify.r_max", "6");
  c.set_text("certify.grid", "11");
  c.set_text("geometry.j_max", "3");
  c.set_text("geometry.r_max", "4");
  c.set_text("scan.depths", "2,3,4");
  c.set_text("weight.beta", "0.5");
  return c;
}

const Table& table(const Report& r, const std::string& name) {
  for (const auto& t : r.tables)
    if (t.name == name) return t;
  FAIL("missing table " << name);
  return r.tables.front();
}

Errc code_of(const std::string& sub, const ExperimentConfig& c) {
  try {
    run_experiment(sub, c);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::domain;
}

using Columns = std::vector<std::string>;

}  // namespace

TEST_CASE("every subcommand passes on a small configuration") {
  const ExperimentConfig c = small_config();
  for (const char* sub : subcommands()) {
    CAPTURE(sub);
    const Report r = run_experiment(sub, c);
    CHECK(r.subcommand == sub);
    CHECK(r.pass());
    auto echo = c.to_json();
    echo.erase("threads");
    CHECK(r.config == echo);
    CHECK(ExperimentConfig::from_json(r.config).to_json() == c.to_json());
    CHECK_FALSE(r.checks.empty());
  }
}

TEST_CASE("table schemas") {
  const ExperimentConfig c = small_config();
  CHECK(table(run_experiment("geometry", c), "sizes").columns ==
        Columns{"k", "j", "r", "sphere_size", "ball_size", "oracle_sphere", "oracle_ball", "level_sum", "match"});
  CHECK(table(run_experiment("maxfn", c), "field").columns == Columns{"vertex", "mode", "value", "radius"});
  CHECK(table(run_experiment("zconst", c), "zclass").columns ==
        Columns{"r", "constant", "method", "E_size", "F_size", "E_witness", "F_witness", "evals", "millis"});
  const Report lemma = run_experiment("lemma", c);
  CHECK(table(lemma, "steps").columns == Columns{"instance_id", "step", "lhs", "rhs", "slack", "pass"});
  CHECK(table(lemma, "instances").rows.size() == 12);
  const Report chain = run_experiment("chain", c);
  CHECK(table(chain, "steps").columns == Columns{"instance_id", "step", "lhs", "rhs", "slack", "pass"});
  CHECK(table(chain, "phi").rows.size() == 100);
  CHECK(table(run_experiment("scan", c), "scan").columns ==
        Columns{"eval_depth", "member", "numerator", "denominator", "ratio"});
}

TEST_CASE("reports do not depend on the thread count") {
  ExperimentConfig c = small_config();
  for (const char* sub : subcommands()) {
    c.set_text("threads", "1");
    const std::string one = report_json_text(run_experiment(sub, c));
    c.set_text("threads", "3");
    CHECK(report_json_text(run_experiment(sub, c)) == one);
  }
}

TEST_CASE("certify reports the window") {
  ExperimentConfig c = small_config();
  const Report r = run_experiment("certify", c);
  CHECK(r.summary["window_lo"] == 0.0);
  CHECK(r.summary["window_hi"] == 0.5);
  CHECK(r.summary["verdict"] == "certified");
  c.set_text("weight.beta", "1.5");
  const Report out = run_experiment("certify", c);
  CHECK(out.summary["verdict"] == "refuted");
  CHECK(out.pass());
}

TEST_CASE("zero function lemma run passes") {
  ExperimentConfig c = small_config();
  c.set_text("function.kind", "zero");
  const Report r = run_experiment("lemma", c);
  CHECK(r.pass());
  for (const auto& row : table(r, "instances").rows) CHECK(std::get<double>(row[5]) == 0.0);
}

TEST_CASE("equal weights make the two-weight run match the one-weight run") {
  ExperimentConfig c = small_config();
  c.set_text("weight2.beta", "0.5");
  c.set_text("lemma.constant", "2");
  c.set_text("lemma.instances", "6");
  const Report one = run_experiment("lemma", c);
  const Report two = run_experiment("twoweight", c);
  CHECK(table(one, "instances").rows == table(two, "instances").rows);
  CHECK(table(one, "steps").rows == table(two, "steps").rows);
}

TEST_CASE("error categories") {
  ExperimentConfig c = small_config();
  CHECK(code_of("bogus", c) == Errc::invalid_config);
  c.set_text("zconst.method", "exhaustive");
  c.set_text("zconst.region_depth", "3");
  CHECK(code_of("zconst", c) == Errc::oracle_guard);
  c.set_text("zconst.method", "both");
  CHECK(run_experiment("zconst", c).pass());

  ExperimentConfig f = small_config();
  f.set_text("mode", "free");
  f.set_text("q", "5");
  CHECK(code_of("certify", f) == Errc::invalid_config);
  CHECK(code_of("chain", f) == Errc::invalid_config);

  ExperimentConfig bad = small_config();
  bad.set_text("alpha", "0.9");
  CHECK(code_of("geometry", bad) == Errc::invalid_config);
}

TEST_CASE("test functions") {
  ExperimentConfig c = small_config();
  CHECK(make_test_function(c, 1).support_size() > 0);
  c.set_text("function.kind", "delta");
  CHECK(make_test_function(c, 1).support() == VertexSet{VertexId::root()});
  c.set_text("function.kind", "zero");
  CHECK(make_test_function(c, 1).is_zero());
}
