#ifndef E2M_E2M_H
#define E2M_E2M_H

/*
 * C interface to the evidential-EM estimator for progressively censored
 * Rayleigh mixtures.
 *
 * Every function returns an e2m_status. On failure a description is available
 * from e2m_last_error() on the calling thread until the next call into the
 * library from that thread. Handles are opaque and owned by the caller.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define E2M_API __declspec(dllexport)
#else
#  define E2M_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum e2m_status {
  E2M_OK = 0,
  E2M_ERR_INVALID_ARGUMENT = 1,
  E2M_ERR_CONFIG = 2,
  E2M_ERR_NOT_CONVERGED = 3,
  E2M_ERR_DEGENERATE = 4,
  E2M_ERR_IO = 5,
  E2M_ERR_SCHEME_INVALID = 6,
  E2M_ERR_TOTAL_CONFLICT = 7,
  E2M_ERR_COMPONENT_STARVED = 8,
  E2M_ERR_INTERNAL = 9
} e2m_status;

typedef enum e2m_command { E2M_CMD_GENERATE = 0, E2M_CMD_FIT = 1, E2M_CMD_SWEEP = 2 } e2m_command;

typedef struct e2m_config e2m_config;
typedef struct e2m_dataset e2m_dataset;
typedef struct e2m_fit_result e2m_fit_result;

E2M_API const char* e2m_version(void);
E2M_API const char* e2m_last_error(void);
E2M_API const char* e2m_status_name(e2m_status status);

/* Run configuration: a JSON object assembled from a file plus overrides. */
E2M_API e2m_status e2m_config_create(e2m_config** out);
E2M_API void e2m_config_destroy(e2m_config* cfg);
E2M_API e2m_status e2m_config_load_file(e2m_config* cfg, const char* path);
/* `json_value` is JSON text, e.g. "500", "0.4", "[1,2]", "\"dir\"". */
E2M_API e2m_status e2m_config_set(e2m_config* cfg, const char* key, const char* json_value);
/* Validates and writes the resolved configuration as JSON. When `buf` is too
 * small (or NULL) nothing is written and `needed` receives the size including
 * the terminator. */
E2M_API e2m_status e2m_config_resolve(const e2m_config* cfg, e2m_command command, char* buf, size_t cap,
                                      size_t* needed);
/* Runs a workflow, writing its files under the configured output directory.
 * Fit returns E2M_ERR_NOT_CONVERGED (after writing results) when the
 * iteration limit is reached first. */
E2M_API e2m_status e2m_run(const e2m_config* cfg, e2m_command command);

/* Data sets in the CSV formats written by the generate workflow. */
E2M_API e2m_status e2m_dataset_load(const char* dataset_csv, const char* soft_labels_csv, e2m_dataset** out);
E2M_API void e2m_dataset_destroy(e2m_dataset* ds);
E2M_API size_t e2m_dataset_size(const e2m_dataset* ds);
E2M_API size_t e2m_dataset_components(const e2m_dataset* ds);
E2M_API size_t e2m_dataset_observed(const e2m_dataset* ds);

/* Fits from (lambda0, xi0), each of length `p`. Passing NULL for both uses the
 * quantile-spread starting point. max_iters = 0 and tol <= 0 select the
 * defaults (1000 and 1e-8). */
E2M_API e2m_status e2m_fit(const e2m_dataset* ds, const double* lambda0, const double* xi0, size_t p,
                           size_t max_iters, double tol, e2m_fit_result** out);
E2M_API void e2m_fit_result_destroy(e2m_fit_result* res);
E2M_API size_t e2m_fit_result_components(const e2m_fit_result* res);
E2M_API e2m_status e2m_fit_result_params(const e2m_fit_result* res, double* lambdas, double* xis, size_t p);
E2M_API size_t e2m_fit_result_iterations(const e2m_fit_result* res);
E2M_API int e2m_fit_result_converged(const e2m_fit_result* res);
E2M_API double e2m_fit_result_gll(const e2m_fit_result* res);
/* Number of trace entries (iterations + 1, including the starting point). */
E2M_API size_t e2m_fit_result_trace_length(const e2m_fit_result* res);
E2M_API double e2m_fit_result_trace_gll(const e2m_fit_result* res, size_t k);

/* Primitives. */
E2M_API e2m_status e2m_bayes_contour_combine(const double* p1, const double* pl2, size_t p, double* out,
                                             double* conflict);
E2M_API e2m_status e2m_rayleigh_pdf(double xi, double x, double* out);
E2M_API e2m_status e2m_rayleigh_survival(double xi, double x, double* out);
E2M_API e2m_status e2m_rayleigh_quantile(double xi, double u, double* out);

#ifdef __cplusplus
}
#endif

#endif /* E2M_E2M_H */
