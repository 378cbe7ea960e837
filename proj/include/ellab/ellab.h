#ifndef ELLAB_H
#define ELLAB_H

/* C interface to the elliptic-regularity laboratory.
 *
 * Conventions:
 *   - Every operation returns el_status; EL_OK is 0.
 *   - On any non-OK status, el_last_error() holds a human-readable message
 *     for the calling thread until its next API call.
 *   - Objects are opaque handles created and destroyed by this library.
 *   - Strings returned through `const char**` are owned by the handle they
 *     came from and stay valid until the next call on that handle or its
 *     destruction.  Copy them if you need them longer.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum el_status {
  EL_OK = 0,
  EL_INVALID_ARGUMENT = 1,
  EL_ELLIPTICITY_VIOLATION = 2,
  EL_CONVERGENCE_FAILURE = 3,
  EL_TOO_COARSE = 4,
  EL_DOMAIN_MARGIN = 5,
  EL_NO_EXTERIOR = 6,
  EL_STOPPING_FAILURE = 7,
  EL_IO_ERROR = 8,
  EL_INTERNAL = 9
} el_status;

/* Stable name of a status code ("ok", "invalid_argument", ...). */
const char* el_status_name(el_status status);

/* Message of the calling thread's most recent failure ("" if none). */
const char* el_last_error(void);

/* Library version string. */
const char* el_version(void);

/* ------------------------------------------------------------------ */
/* Experiment configuration                                            */
/* ------------------------------------------------------------------ */

typedef struct el_config el_config;

/* Creates a configuration holding the documented defaults. */
el_status el_config_create(el_config** out);
void el_config_destroy(el_config* cfg);

/* Merges a TOML-style key/value text (or file) into the configuration.
 * Every malformed line and unknown key is collected; if any were found the
 * call returns EL_INVALID_ARGUMENT with all of them in el_last_error(),
 * and well-formed lines are still applied. */
el_status el_config_parse_text(el_config* cfg, const char* text);
el_status el_config_parse_file(el_config* cfg, const char* path);

/* Sets or reads one key using the config-file syntax and key names
 * (seed, n, m, lambda, Lambda, alpha, p, q, eps, instances,
 * coefficient_class, experiment, output_dir). */
el_status el_config_set(el_config* cfg, const char* key, const char* value);
el_status el_config_get(el_config* cfg, const char* key,
                        const char** out_value);

/* EL_OK when the configuration is semantically valid; otherwise
 * EL_INVALID_ARGUMENT with every problem listed in el_last_error(). */
el_status el_config_validate(el_config* cfg);

/* The full configuration echoed in config-file syntax. */
el_status el_config_text(el_config* cfg, const char** out_text);

/* ------------------------------------------------------------------ */
/* Experiment runs                                                     */
/* ------------------------------------------------------------------ */

typedef struct el_report el_report;

/* Validates the configuration (all problems reported at once), runs the
 * configured experiment, and writes report.json, rows.csv, and the plot
 * .dat files into output_dir.  Per-instance failures are recorded in the
 * report; the run continues past them. */
el_status el_run_experiment(el_config* cfg, el_report** out);
void el_report_destroy(el_report* report);

/* Aggregate numbers.  Any output pointer may be NULL. */
el_status el_report_summary(el_report* report, double* headline_min,
                            double* headline_max, double* headline_median,
                            int* failures, int* instances);

/* Serialized forms of the report (same content as the files on disk). */
el_status el_report_json(el_report* report, const char** out_text);
el_status el_report_csv(el_report* report, const char** out_text);

/* Threshold breaches for assert-mode runs: newline-separated list in
 * out_text (empty string when clean), count in out_count.  Either output
 * may be NULL. */
el_status el_report_breaches(el_report* report, const char** out_text,
                             int* out_count);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ELLAB_H */
