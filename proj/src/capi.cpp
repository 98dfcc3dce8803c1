#include "ktree/ktree.h"

#include <memory>
#include <new>
#include <optional>
#include <string>

#include "ktree/averages.hpp"
#include "ktree/config.hpp"
#include "ktree/error.hpp"
#include "ktree/experiment.hpp"
#include "ktree/report.hpp"
#include "ktree/tree.hpp"

struct kt_experiment {
  ktree::ExperimentConfig config;
  std::optional<ktree::Report> report;
  std::string text;  // backing store for returned strings
};

struct kt_function {
  ktree::TreeFunction f;
};

struct kt_weight {
  ktree::Weight w;
};

namespace {

thread_local std::string last_error;

kt_status status_of(ktree::Errc code) {
  switch (code) {
    case ktree::Errc::invalid_config: return KT_INVALID_CONFIG;
    case ktree::Errc::oracle_guard: return KT_ORACLE_GUARD;
    case ktree::Errc::io: return KT_IO_ERROR;
    case ktree::Errc::unsupported: return KT_UNSUPPORTED;
    case ktree::Errc::domain:
    case ktree::Errc::out_of_tree:
    case ktree::Errc::overflow: return KT_DOMAIN_ERROR;
  }
  return KT_INTERNAL;
}

template <class Body>
kt_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return KT_OK;
  } catch (const ktree::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return KT_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return KT_INTERNAL;
  }
}

kt_status invalid_argument(const char* what) {
  last_error = what;
  return KT_INVALID_ARGUMENT;
}

const ktree::Table* table_at(const kt_experiment* exp, size_t index) {
  if (!exp || !exp->report || index >= exp->report->tables.size()) return nullptr;
  return &exp->report->tables[index];
}

const ktree::Check* check_at(const kt_experiment* exp, size_t index) {
  if (!exp || !exp->report || index >= exp->report->checks.size()) return nullptr;
  return &exp->report->checks[index];
}

}  // namespace

extern "C" {

const char* kt_last_error(void) { return last_error.c_str(); }

const char* kt_status_name(kt_status status) {
  switch (status) {
    case KT_OK: return "ok";
    case KT_ASSERTION_FAILED: return "assertion failed";
    case KT_INVALID_CONFIG: return "invalid config";
    case KT_ORACLE_GUARD: return "oracle guard";
    case KT_IO_ERROR: return "io error";
    case KT_DOMAIN_ERROR: return "domain error";
    case KT_UNSUPPORTED: return "unsupported";
    case KT_INTERNAL: return "internal error";
    case KT_INVALID_ARGUMENT: return "invalid argument";
  }
  return "unknown";
}

int kt_exit_code(kt_status status) {
  switch (status) {
    case KT_OK: return 0;
    case KT_INVALID_CONFIG:
    case KT_DOMAIN_ERROR:
    case KT_UNSUPPORTED:
    case KT_INVALID_ARGUMENT: return 2;
    case KT_ORACLE_GUARD: return 3;
    case KT_IO_ERROR: return 4;
    default: return 1;
  }
}

size_t kt_config_field_count(void) { return ktree::config_fields().size(); }

const char* kt_config_field_name(size_t index) {
  return index < ktree::config_fields().size() ? ktree::config_fields()[index].name : nullptr;
}

const char* kt_config_field_help(size_t index) {
  return index < ktree::config_fields().size() ? ktree::config_fields()[index].help : nullptr;
}

const char* kt_config_field_default(size_t index) {
  return index < ktree::config_fields().size() ? ktree::config_fields()[index].default_value : nullptr;
}

size_t kt_subcommand_count(void) { return ktree::subcommands().size(); }

const char* kt_subcommand_name(size_t index) {
  return index < ktree::subcommands().size() ? ktree::subcommands()[index] : nullptr;
}

kt_status kt_experiment_create(kt_experiment** out) {
  if (!out) return invalid_argument("null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new kt_experiment{}; });
}

void kt_experiment_destroy(kt_experiment* exp) { delete exp; }

kt_status kt_experiment_load_file(kt_experiment* exp, const char* path) {
  if (!exp || !path) return invalid_argument("null argument");
  return guarded([&] { exp->config = ktree::ExperimentConfig::from_file(path); });
}

kt_status kt_experiment_load_json(kt_experiment* exp, const char* json_text) {
  if (!exp || !json_text) return invalid_argument("null argument");
  return guarded([&] {
    const auto doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) ktree::fail(ktree::Errc::invalid_config, "configuration is not valid JSON");
    exp->config = ktree::ExperimentConfig::from_json(doc);
  });
}

kt_status kt_experiment_set(kt_experiment* exp, const char* field, const char* value) {
  if (!exp || !field || !value) return invalid_argument("null argument");
  return guarded([&] { exp->config.set_text(field, value); });
}

const char* kt_experiment_config_json(kt_experiment* exp) {
  if (!exp) return nullptr;
  const kt_status s = guarded([&] { exp->text = exp->config.to_json().dump(2); });
  return s == KT_OK ? exp->text.c_str() : nullptr;
}

kt_status kt_experiment_run(kt_experiment* exp, const char* subcommand) {
  if (!exp || !subcommand) return invalid_argument("null argument");
  exp->report.reset();
  return guarded([&] { exp->report = ktree::run_experiment(subcommand, exp->config); });
}

int kt_experiment_passed(const kt_experiment* exp) { return exp && exp->report && exp->report->pass() ? 1 : 0; }

const char* kt_experiment_report_json(kt_experiment* exp) {
  if (!exp || !exp->report) return nullptr;
  const kt_status s = guarded([&] { exp->text = ktree::report_json_text(*exp->report); });
  return s == KT_OK ? exp->text.c_str() : nullptr;
}

size_t kt_experiment_table_count(const kt_experiment* exp) {
  return exp && exp->report ? exp->report->tables.size() : 0;
}

const char* kt_experiment_table_name(const kt_experiment* exp, size_t index) {
  const ktree::Table* t = table_at(exp, index);
  return t ? t->name.c_str() : nullptr;
}

const char* kt_experiment_table_csv(kt_experiment* exp, size_t index) {
  const ktree::Table* t = table_at(exp, index);
  if (!t) return nullptr;
  const kt_status s = guarded([&] { exp->text = ktree::to_csv(*t); });
  return s == KT_OK ? exp->text.c_str() : nullptr;
}

size_t kt_experiment_check_count(const kt_experiment* exp) {
  return exp && exp->report ? exp->report->checks.size() : 0;
}

const char* kt_experiment_check_name(const kt_experiment* exp, size_t index) {
  const ktree::Check* c = check_at(exp, index);
  return c ? c->name.c_str() : nullptr;
}

const char* kt_experiment_check_detail(const kt_experiment* exp, size_t index) {
  const ktree::Check* c = check_at(exp, index);
  return c ? c->detail.c_str() : nullptr;
}

int kt_experiment_check_passed(const kt_experiment* exp, size_t index) {
  const ktree::Check* c = check_at(exp, index);
  return c && c->pass ? 1 : 0;
}

int kt_experiment_check_informational(const kt_experiment* exp, size_t index) {
  const ktree::Check* c = check_at(exp, index);
  return c && c->informational ? 1 : 0;
}

const char* kt_experiment_first_failure(const kt_experiment* exp) {
  if (!exp || !exp->report) return nullptr;
  const ktree::Check* c = exp->report->first_failure();
  return c ? c->name.c_str() : nullptr;
}

kt_status kt_experiment_write(kt_experiment* exp) {
  if (!exp) return invalid_argument("null argument");
  if (!exp->report) return invalid_argument("no report; run a subcommand first");
  return guarded([&] {
    ktree::write_report(*exp->report, exp->config.text("output.dir"), exp->config.text("output.format"));
  });
}

kt_status kt_experiment_write_to(kt_experiment* exp, const char* dir, const char* format) {
  if (!exp || !dir || !format) return invalid_argument("null argument");
  if (!exp->report) return invalid_argument("no report; run a subcommand first");
  return guarded([&] { ktree::write_report(*exp->report, dir, format); });
}

kt_status kt_sphere_size(int k, int depth, int r, uint64_t* out) {
  if (!out) return invalid_argument("null output pointer");
  return guarded([&] { *out = ktree::sphere_size(k, depth, r); });
}

kt_status kt_ball_size(int k, int depth, int r, uint64_t* out) {
  if (!out) return invalid_argument("null output pointer");
  return guarded([&] { *out = ktree::ball_size(k, depth, r); });
}

kt_status kt_level_sphere_count(int k, int depth, int r, int m, uint64_t* out) {
  if (!out) return invalid_argument("null output pointer");
  return guarded([&] { *out = ktree::level_sphere_count(k, depth, r, m); });
}

kt_status kt_distance(int k, const char* path_a, const char* path_b, int* out) {
  if (!path_a || !path_b || !out) return invalid_argument("null argument");
  return guarded([&] {
    const ktree::Tree tree(k);
    *out = tree.distance(tree.parse_path(path_a), tree.parse_path(path_b));
  });
}

kt_status kt_function_create(int k, int max_depth, kt_function** out) {
  if (!out) return invalid_argument("null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new kt_function{ktree::TreeFunction(k, max_depth)}; });
}

kt_status kt_function_random(int k, int max_depth, uint64_t seed, double density, double lo, double hi,
                             kt_function** out) {
  if (!out) return invalid_argument("null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new kt_function{ktree::random_function(k, max_depth, seed, density, lo, hi)}; });
}

void kt_function_destroy(kt_function* f) { delete f; }

kt_status kt_function_set(kt_function* f, const char* path, double value) {
  if (!f || !path) return invalid_argument("null argument");
  return guarded([&] { f->f.set(f->f.tree().parse_path(path), value); });
}

kt_status kt_function_get(const kt_function* f, const char* path, double* out) {
  if (!f || !path || !out) return invalid_argument("null argument");
  return guarded([&] { *out = f->f(f->f.tree().parse_path(path)); });
}

kt_status kt_weight_radial(int k, double beta, kt_weight** out) {
  if (!out) return invalid_argument("null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new kt_weight{ktree::Weight::radial(k, beta)}; });
}

void kt_weight_destroy(kt_weight* w) { delete w; }

kt_status kt_spherical_average(const kt_function* f, const char* path, int r, double alpha, double* out) {
  if (!f || !path || !out) return invalid_argument("null argument");
  return guarded([&] {
    const ktree::SphericalEvaluator eval(f->f);
    *out = eval.spherical_average(f->f.tree().parse_path(path), r, alpha);
  });
}

kt_status kt_spherical_maximal(const kt_function* f, const char* path, double alpha, double* out, int* radius_out) {
  if (!f || !path || !out) return invalid_argument("null argument");
  return guarded([&] {
    const ktree::SphericalEvaluator eval(f->f);
    const auto m = eval.spherical_maximal(f->f.tree().parse_path(path), alpha);
    *out = m.value;
    if (radius_out) *radius_out = m.radius;
  });
}

kt_status kt_ball_maximal(const kt_function* f, const char* path, double alpha, double* out, int* radius_out) {
  if (!f || !path || !out) return invalid_argument("null argument");
  return guarded([&] {
    const ktree::SphericalEvaluator eval(f->f);
    const auto m = eval.ball_maximal(f->f.tree().parse_path(path), alpha);
    *out = m.value;
    if (radius_out) *radius_out = m.radius;
  });
}

kt_status kt_lp_norm(const kt_function* f, double p, const kt_weight* w, double* out) {
  if (!f || !w || !out) return invalid_argument("null argument");
  return guarded([&] { *out = ktree::lp_norm(f->f, p, w->w); });
}

kt_status kt_derived_exponents(double p, double alpha, double* q, double* delta, double* epsilon) {
  if (!q || !delta || !epsilon) return invalid_argument("null output pointer");
  return guarded([&] {
    const auto cfg = ktree::derived_exponents(2, p, alpha);
    *q = cfg.q;
    *delta = cfg.delta;
    *epsilon = cfg.epsilon;
  });
}

}  // extern "C"
