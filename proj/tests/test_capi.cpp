#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "ktree/ktree.h"

TEST_CASE("status names and exit codes") {
  CHECK(std::string(kt_status_name(KT_ORACLE_GUARD)) == "oracle guard");
  CHECK(kt_exit_code(KT_OK) == 0);
  CHECK(kt_exit_code(KT_ASSERTION_FAILED) == 1);
  CHECK(kt_exit_code(KT_INTERNAL) == 1);
  CHECK(kt_exit_code(KT_INVALID_CONFIG) == 2);
  CHECK(kt_exit_code(KT_DOMAIN_ERROR) == 2);
  CHECK(kt_exit_code(KT_ORACLE_GUARD) == 3);
  CHECK(kt_exit_code(KT_IO_ERROR) == 4);
}

TEST_CASE("config field table") {
  REQUIRE(kt_config_field_count() > 30);
  bool seen_beta = false;
  for (size_t i = 0; i < kt_config_field_count(); ++i) {
    CHECK(kt_config_field_name(i) != nullptr);
    CHECK(kt_config_field_help(i) != nullptr);
    seen_beta = seen_beta || std::strcmp(kt_config_field_name(i), "weight.beta") == 0;
  }
  CHECK(seen_beta);
  CHECK(kt_config_field_name(kt_config_field_count()) == nullptr);
  CHECK(kt_subcommand_count() == 8);
}

TEST_CASE("experiment lifecycle") {
  kt_experiment* exp = nullptr;
  REQUIRE(kt_experiment_create(&exp) == KT_OK);
  CHECK(kt_experiment_report_json(exp) == nullptr);
  CHECK(kt_experiment_set(exp, "geometry.j_max", "3") == KT_OK);
  CHECK(kt_experiment_set(exp, "geometry.r_max", "4") == KT_OK);
  CHECK(kt_experiment_set(exp, "k", "x") == KT_INVALID_CONFIG);
  CHECK(std::string(kt_last_error()).find("'k'") != std::string::npos);
  CHECK(kt_experiment_write(exp) == KT_INVALID_ARGUMENT);

  REQUIRE(kt_experiment_run(exp, "geometry") == KT_OK);
  CHECK(std::string(kt_last_error()).empty());
  CHECK(kt_experiment_passed(exp) == 1);
  CHECK(kt_experiment_first_failure(exp) == nullptr);
  REQUIRE(kt_experiment_table_count(exp) == 2);
  CHECK(std::string(kt_experiment_table_name(exp, 0)) == "sizes");
  CHECK(std::string(kt_experiment_table_csv(exp, 0)).rfind("k,j,r,", 0) == 0);
  CHECK(kt_experiment_table_csv(exp, 5) == nullptr);
  REQUIRE(kt_experiment_check_count(exp) > 0);
  CHECK(kt_experiment_check_passed(exp, 0) == 1);
  CHECK(std::string(kt_experiment_report_json(exp)).find("\"subcommand\": \"geometry\"") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "ktree_test_capi";
  std::filesystem::remove_all(dir);
  CHECK(kt_experiment_write_to(exp, dir.string().c_str(), "csv") == KT_OK);
  CHECK(std::filesystem::exists(dir / "geometry_sizes.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "geometry.json"));

  CHECK(kt_experiment_run(exp, "nothing") == KT_INVALID_CONFIG);
  CHECK(kt_experiment_table_count(exp) == 0);
  CHECK(kt_experiment_load_json(exp, "{\"alpha\": 2}") == KT_OK);
  CHECK(kt_experiment_run(exp, "geometry") == KT_INVALID_CONFIG);
  CHECK(kt_experiment_load_json(exp, "{oops") == KT_INVALID_CONFIG);
  CHECK(kt_experiment_load_file(exp, "/nonexistent/config.json") == KT_IO_ERROR);
  CHECK(kt_experiment_run(nullptr, "geometry") == KT_INVALID_ARGUMENT);
  kt_experiment_destroy(exp);
}

TEST_CASE("oracle guard status") {
  kt_experiment* exp = nullptr;
  REQUIRE(kt_experiment_create(&exp) == KT_OK);
  kt_experiment_set(exp, "zconst.method", "exhaustive");
  kt_experiment_set(exp, "zconst.region_depth", "3");
  CHECK(kt_experiment_run(exp, "zconst") == KT_ORACLE_GUARD);
  kt_experiment_destroy(exp);
}

TEST_CASE("geometry entry points") {
  uint64_t n = 0;
  CHECK(kt_sphere_size(2, 0, 3, &n) == KT_OK);
  CHECK(n == 8);
  CHECK(kt_sphere_size(2, 2, 1, &n) == KT_OK);
  CHECK(n == 3);
  CHECK(kt_ball_size(2, 0, 2, &n) == KT_OK);
  CHECK(n == 7);
  CHECK(kt_level_sphere_count(2, 1, 1, 1, &n) == KT_OK);
  CHECK(n == 1);
  int d = -1;
  CHECK(kt_distance(2, "2,01", "2,10", &d) == KT_OK);
  CHECK(d == 4);
  CHECK(kt_distance(2, "2,02", "0,", &d) == KT_DOMAIN_ERROR);
  CHECK(kt_sphere_size(1, 0, 1, &n) == KT_DOMAIN_ERROR);
  CHECK(kt_sphere_size(2, 0, 1, nullptr) == KT_INVALID_ARGUMENT);
}

TEST_CASE("functions and operators") {
  kt_function* f = nullptr;
  REQUIRE(kt_function_create(2, 2, &f) == KT_OK);
  CHECK(kt_function_set(f, "0,", 1.0) == KT_OK);
  CHECK(kt_function_set(f, "3,000", 1.0) == KT_DOMAIN_ERROR);
  double v = 0.0;
  CHECK(kt_function_get(f, "0,", &v) == KT_OK);
  CHECK(v == 1.0);
  // S("2,00", 2) holds the root, the sibling "2,01" and four grandchildren.
  CHECK(kt_spherical_average(f, "2,00", 2, 0.5, &v) == KT_OK);
  CHECK(v == doctest::Approx(1.0 / std::sqrt(6.0)));
  int radius = -1;
  CHECK(kt_spherical_maximal(f, "2,00", 0.5, &v, &radius) == KT_OK);
  CHECK(radius == 2);
  CHECK(kt_ball_maximal(f, "0,", 0.5, &v, nullptr) == KT_OK);
  CHECK(v == 1.0);
  CHECK(kt_spherical_average(f, "0,", 1, 1.5, &v) == KT_DOMAIN_ERROR);

  kt_weight* w = nullptr;
  REQUIRE(kt_weight_radial(2, 1.0, &w) == KT_OK);
  CHECK(kt_function_set(f, "1,1", 2.0) == KT_OK);
  CHECK(kt_lp_norm(f, 2.0, w, &v) == KT_OK);
  CHECK(v == doctest::Approx(std::sqrt(1.0 + 4.0 * 2.0)));
  kt_weight_destroy(w);
  kt_function_destroy(f);

  kt_function* g = nullptr;
  CHECK(kt_function_random(3, 3, 7, 0.5, 0.0625, 1.0, &g) == KT_OK);
  kt_function_destroy(g);
}

TEST_CASE("exponents") {
  double q = 0, delta = 0, eps = 0;
  CHECK(kt_derived_exponents(2.0, 0.25, &q, &delta, &eps) == KT_OK);
  CHECK(q == 4.0);
  CHECK(delta == -1.0);
  CHECK(eps == doctest::Approx(2.0 / 3.0));
  CHECK(kt_derived_exponents(2.0, 0.6, &q, &delta, &eps) == KT_DOMAIN_ERROR);
}
