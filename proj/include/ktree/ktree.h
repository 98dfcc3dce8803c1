#ifndef KTREE_KTREE_H
#define KTREE_KTREE_H

#include <stddef.h>
#include <stdint.h>

#if defined(KTREE_BUILDING_LIBRARY)
#define KT_API __attribute__((visibility("default")))
#else
#define KT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kt_status {
  KT_OK = 0,
  KT_ASSERTION_FAILED = 1,
  KT_INVALID_CONFIG = 2,
  KT_ORACLE_GUARD = 3,
  KT_IO_ERROR = 4,
  KT_DOMAIN_ERROR = 5,
  KT_UNSUPPORTED = 6,
  KT_INTERNAL = 7,
  KT_INVALID_ARGUMENT = 8
} kt_status;

/* Message of the last failing call on this thread; "" after a success. */
KT_API const char* kt_last_error(void);
KT_API const char* kt_status_name(kt_status status);
/* Process exit code for a status: 0, 1 (assertion), 2, 3 or 4. */
KT_API int kt_exit_code(kt_status status);

/* ---- configuration fields ---- */

KT_API size_t kt_config_field_count(void);
KT_API const char* kt_config_field_name(size_t index);
KT_API const char* kt_config_field_help(size_t index);
/* Default value as a JSON literal. */
KT_API const char* kt_config_field_default(size_t index);

/* ---- experiments ---- */

typedef struct kt_experiment kt_experiment;

KT_API size_t kt_subcommand_count(void);
KT_API const char* kt_subcommand_name(size_t index);

KT_API kt_status kt_experiment_create(kt_experiment** out);
KT_API void kt_experiment_destroy(kt_experiment* exp);
/* Replaces the configuration with the defaults overlaid by a JSON document. */
KT_API kt_status kt_experiment_load_file(kt_experiment* exp, const char* path);
KT_API kt_status kt_experiment_load_json(kt_experiment* exp, const char* json_text);
/* Sets one dotted field from command-line text. */
KT_API kt_status kt_experiment_set(kt_experiment* exp, const char* field, const char* value);
/* Nested JSON echo of the configuration. Valid until the next call on exp. */
KT_API const char* kt_experiment_config_json(kt_experiment* exp);

/* Runs a subcommand. KT_OK means the run completed; whether its checks passed
   is reported by kt_experiment_passed. Errors leave no report. */
KT_API kt_status kt_experiment_run(kt_experiment* exp, const char* subcommand);
KT_API int kt_experiment_passed(const kt_experiment* exp);
KT_API const char* kt_experiment_report_json(kt_experiment* exp);
KT_API size_t kt_experiment_table_count(const kt_experiment* exp);
KT_API const char* kt_experiment_table_name(const kt_experiment* exp, size_t index);
KT_API const char* kt_experiment_table_csv(kt_experiment* exp, size_t index);
KT_API size_t kt_experiment_check_count(const kt_experiment* exp);
KT_API const char* kt_experiment_check_name(const kt_experiment* exp, size_t index);
KT_API const char* kt_experiment_check_detail(const kt_experiment* exp, size_t index);
KT_API int kt_experiment_check_passed(const kt_experiment* exp, size_t index);
KT_API int kt_experiment_check_informational(const kt_experiment* exp, size_t index);
/* Name of the first failing non-informational check, or NULL. */
KT_API const char* kt_experiment_first_failure(const kt_experiment* exp);
/* Writes the report to output.dir in output.format. */
KT_API kt_status kt_experiment_write(kt_experiment* exp);
/* Writes the report to an explicit directory and format (csv, json, both). */
KT_API kt_status kt_experiment_write_to(kt_experiment* exp, const char* dir, const char* format);

/* ---- geometry ---- */

/* Vertices are written as "depth,digits": "0," is the root, "3,011" a depth-3 vertex. */
KT_API kt_status kt_sphere_size(int k, int depth, int r, uint64_t* out);
KT_API kt_status kt_ball_size(int k, int depth, int r, uint64_t* out);
KT_API kt_status kt_level_sphere_count(int k, int depth, int r, int m, uint64_t* out);
KT_API kt_status kt_distance(int k, const char* path_a, const char* path_b, int* out);

/* ---- functions, weights and operators ---- */

typedef struct kt_function kt_function;
typedef struct kt_weight kt_weight;

/* Zero function supported on vertices of depth <= max_depth. */
KT_API kt_status kt_function_create(int k, int max_depth, kt_function** out);
KT_API kt_status kt_function_random(int k, int max_depth, uint64_t seed, double density, double lo, double hi,
                                    kt_function** out);
KT_API void kt_function_destroy(kt_function* f);
KT_API kt_status kt_function_set(kt_function* f, const char* path, double value);
KT_API kt_status kt_function_get(const kt_function* f, const char* path, double* out);

KT_API kt_status kt_weight_radial(int k, double beta, kt_weight** out);
KT_API void kt_weight_destroy(kt_weight* w);

KT_API kt_status kt_spherical_average(const kt_function* f, const char* path, int r, double alpha, double* out);
/* Maximal operators; radius_out may be NULL. */
KT_API kt_status kt_spherical_maximal(const kt_function* f, const char* path, double alpha, double* out, int* radius_out);
KT_API kt_status kt_ball_maximal(const kt_function* f, const char* path, double alpha, double* out, int* radius_out);
KT_API kt_status kt_lp_norm(const kt_function* f, double p, const kt_weight* w, double* out);

/* q, delta and epsilon of the sobolev exponent relation. */
KT_API kt_status kt_derived_exponents(double p, double alpha, double* q, double* delta, double* epsilon);

#ifdef __cplusplus
}
#endif

#endif
