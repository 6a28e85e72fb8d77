/* C interface of the sqglab spectral simulation library.
 *
 * All functions return sqg_status; SQG_OK is 0.  On failure a thread-local
 * message is available from sqg_last_error().  Objects are opaque handles
 * released with their _free function; strings returned through char** are
 * released with sqg_string_free.
 */
#ifndef SQGLAB_H
#define SQGLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sqg_status {
    SQG_OK = 0,
    SQG_ERR_INVALID_ARGUMENT = 1,
    SQG_ERR_PARSE = 2,
    SQG_ERR_IO = 3,
    SQG_ERR_NUMERIC = 4,
    SQG_ERR_INTERNAL = 5
} sqg_status;

typedef struct sqg_field sqg_field;
typedef struct sqg_sampler sqg_sampler;
typedef struct sqg_report sqg_report;

const char* sqg_version(void);
/* Message of the most recent failure on this thread; never NULL. */
const char* sqg_last_error(void);
void sqg_string_free(char* s);

/* ---- spectral fields ---------------------------------------------------- */

/* JSON format: {"N": int, "coeffs": [[kx, ky, re, im], ...]} with one entry
 * per half-lattice representative; mirror coefficients are conjugated. */
sqg_status sqg_field_from_json(const char* json, sqg_field** out);
sqg_status sqg_field_to_json(const sqg_field* f, char** out_json);
sqg_status sqg_field_truncation(const sqg_field* f, int* out);
/* Fourier-Lebesgue norm; pass p = INFINITY (or HUGE_VAL) for the sup norm. */
sqg_status sqg_field_fl_norm(const sqg_field* f, double p, double s, double* out);
sqg_status sqg_field_coeff(const sqg_field* f, int kx, int ky, double* re, double* im);
void sqg_field_free(sqg_field* f);

/* ---- invariant-measure sampler ------------------------------------------ */

sqg_status sqg_sampler_new(int truncation, uint64_t seed, sqg_sampler** out);
sqg_status sqg_sampler_draw(sqg_sampler* s, sqg_field** out);
sqg_status sqg_sampler_draw_at(const sqg_sampler* s, uint64_t index, sqg_field** out);
void sqg_sampler_free(sqg_sampler* s);

/* ---- coefficient algebra ------------------------------------------------ */

sqg_status sqg_alpha(int h1x, int h1y, int h2x, int h2y, int kx, int ky, double* out);
sqg_status sqg_beta(int kx, int ky, int jx, int jy, double delta, double* out);
sqg_status sqg_gamma(int kx, int ky, int jx, int jy, double delta, double* out);
sqg_status sqg_gamma_row_sum(int kx, int ky, double delta, int cutoff, double* out);

/* ---- nonlinearity ------------------------------------------------------- */

sqg_status sqg_eval_B(const sqg_field* psi, int truncation, sqg_field** out);
sqg_status sqg_h1_pairing(const sqg_field* psi, int truncation, double* value, double* scale);

/* ---- experiments --------------------------------------------------------- */

/* Canonical JSON of the named experiment's default configuration. */
sqg_status sqg_default_config(const char* experiment, char** out_json);
/* Comma-separated experiment names. */
sqg_status sqg_experiment_list(char** out_names);

/* Runs an experiment.  config_json may be NULL (defaults) or a JSON object
 * overriding default keys; out_dir may be NULL for no file output. */
sqg_status sqg_experiment_run(const char* experiment, const char* config_json,
                              const char* out_dir, sqg_report** out);

sqg_status sqg_report_passed(const sqg_report* r, int* out);
sqg_status sqg_report_json(const sqg_report* r, char** out_json);
/* One "PASS/FAIL name value threshold" line per check. */
sqg_status sqg_report_summary(const sqg_report* r, char** out_text);
void sqg_report_free(sqg_report* r);

#ifdef __cplusplus
}
#endif

#endif /* SQGLAB_H */
