/* C interface to the directed-information graph library.
 *
 * Every fallible call returns a dig_status. On failure the message of the
 * most recent error on the calling thread is available from
 * dig_last_error(). Handles are opaque and must be released with the
 * matching *_free function; passing NULL to a *_free function is allowed. */
#ifndef DIG_DIG_H
#define DIG_DIG_H

#include <stddef.h>
#include <stdint.h>

#if defined(DIG_BUILDING_LIBRARY)
#define DIG_API __attribute__((visibility("default")))
#else
#define DIG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dig_status {
  DIG_OK = 0,
  DIG_ERR_DOMAIN = 1,
  DIG_ERR_CONFIGURATION = 2,
  DIG_ERR_CONSTRUCTION = 3,
  DIG_ERR_RESOURCE = 4,
  DIG_ERR_PARSE = 5,
  DIG_ERR_IO = 6,
  DIG_ERR_INVALID_ARGUMENT = 7,
  DIG_ERR_INTERNAL = 8
} dig_status;

typedef struct dig_model dig_model;
typedef struct dig_path dig_path;
typedef struct dig_report dig_report;

typedef struct dig_dimensions {
  int64_t r;
  int64_t d;
  int64_t d_prime;
  int64_t dof_null;
} dig_dimensions;

DIG_API const char *dig_version(void);
DIG_API const char *dig_last_error(void);
DIG_API const char *dig_status_name(dig_status status);

DIG_API dig_status dig_dimensions_compute(int m, int k, int alphabet, dig_dimensions *out);

/* Parses an adjacency description (see dig_model_generate) into an m*m
 * row-major 0/1 matrix. "density=p" draws from `seed`. */
DIG_API dig_status dig_adjacency_parse(const char *spec, int m, uint64_t seed, int *out);

/* FNV-1a 64-bit hash of a NUL-terminated string as 16 hex digits plus a
 * terminator. */
DIG_API dig_status dig_hash_text(const char *text, char *buffer, size_t buffer_size);

/* Models. `edges` uses the adjacency syntax of the command line: "none",
 * "all", "0>1,2>0", "density=0.3" or matrix rows "010;001;000". */
DIG_API dig_status dig_model_generate(int m, int k, int alphabet, const char *edges,
                                      double epsilon, uint64_t seed, dig_model **out);
DIG_API dig_status dig_model_binary_channel(double flip, dig_model **out);
DIG_API dig_status dig_model_load(const char *file, dig_model **out);
DIG_API dig_status dig_model_save(const dig_model *model, const char *file);
DIG_API void dig_model_free(dig_model *model);
DIG_API dig_status dig_model_info(const dig_model *model, int *m, int *k, int *alphabet);
DIG_API dig_status dig_model_edge(const dig_model *model, int i, int j, int *present);
DIG_API dig_status dig_model_exact_di(const dig_model *model, int i, int j, double *out);
DIG_API dig_status dig_model_stationary_residual(const dig_model *model, double *out);

/* Paths. A negative burn_in selects the default of 1000 k steps. */
DIG_API dig_status dig_simulate(const dig_model *model, int64_t n, int64_t burn_in,
                                uint64_t seed, dig_path **out);
DIG_API dig_status dig_path_load_csv(const char *file, dig_path **out);
DIG_API dig_status dig_path_save_csv(const dig_path *path, const char *file);
DIG_API void dig_path_free(dig_path *path);
DIG_API dig_status dig_path_info(const dig_path *path, int *m, int64_t *n, int *alphabet);
DIG_API dig_status dig_path_directed_info(const dig_path *path, int k, int i, int j,
                                          double *di_hat, double *lambda);
DIG_API dig_status dig_path_log_likelihood_ratio(const dig_path *path, int k, int i, int j,
                                                 double *out);

/* Threshold whose asymptotic false-alarm bound equals alpha. With
 * single_edge != 0 the chi-squared degrees of freedom of one null edge are
 * used, otherwise the whole-graph bound. */
DIG_API dig_status dig_calibrate_threshold(int m, int k, int alphabet, double alpha,
                                           int single_edge, double *out);

/* Graph test. `alphabet` of 0 takes the alphabet recorded in the path.
 * `hypothesis` is NULL or an m*m row-major 0/1 matrix. */
DIG_API dig_status dig_test_graph(const dig_path *path, int k, int alphabet, double i_th,
                                  const int *hypothesis, dig_report **out);
DIG_API void dig_report_free(dig_report *report);
/* *accepted is -1 when no hypothesis was given. */
DIG_API dig_status dig_report_accepted(const dig_report *report, int *accepted);
DIG_API dig_status dig_report_edge(const dig_report *report, int i, int j, int *present);
DIG_API dig_status dig_report_save_json(const dig_report *report, const char *file);
DIG_API dig_status dig_report_save_edges_csv(const dig_report *report, const char *file);

/* Asymptotic bounds for one threshold and N0 absent edges. */
DIG_API dig_status dig_bounds_point(int m, int k, int alphabet, double i_th, int n0,
                                    double *pf_upper, double *pd_lower);
/* CSV of i_th, pf_upper and one pd_lower column per entry of n0_list. */
DIG_API dig_status dig_bounds_csv(int m, int k, int alphabet, const double *i_th_grid,
                                  size_t grid_size, const int *n0_list, size_t n0_count,
                                  const char *file);

/* Experiment suites: null-chi2, alt-clt, rate, kl-decay, jacobian-rank,
 * single-edge. config_file may be NULL for the built-in configuration.
 * The hash is written as 16 hex digits plus a terminator. */
DIG_API dig_status dig_experiment_config_hash(const char *suite, const char *config_file,
                                              char *buffer, size_t buffer_size);
DIG_API dig_status dig_experiment_run(const char *suite, const char *config_file,
                                      const char *out_dir, int *passed);

#ifdef __cplusplus
}
#endif

#endif /* DIG_DIG_H */
