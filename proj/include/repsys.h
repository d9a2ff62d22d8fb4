/* C interface to the repairable-systems toolkit.
 *
 * Conventions:
 *   - functions returning pointers yield NULL on failure;
 *     functions returning int yield 0 on success, or an error kind:
 *       1 usage error, 2 data error, 3 numerical failure
 *   - rs_last_error_message() describes the most recent failure on the
 *     calling thread; rs_last_error_kind() gives its code
 *   - char* results are owned by the caller; release with rs_string_free
 */
#pragma once

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct rs_dataset rs_dataset;
typedef struct rs_model rs_model;

int rs_last_error_kind(void);
const char* rs_last_error_message(void);
void rs_string_free(char* s);

/* ---- datasets (CSV: header "system_id,time,mark"; windows:
 *      "system_id,censor_time"; pass tau > 0 instead of a windows file) ---- */
rs_dataset* rs_dataset_load(const char* events_path, const char* windows_path,
                            double tau, const char* covariates_path);
rs_dataset* rs_dataset_from_csv(const char* events_csv, const char* windows_csv,
                                double tau);
void rs_dataset_free(rs_dataset* d);
int rs_dataset_system_count(const rs_dataset* d);
int rs_dataset_total_events(const rs_dataset* d);
char* rs_dataset_events_csv(const rs_dataset* d);
char* rs_dataset_windows_csv(const rs_dataset* d);

/* ---- model specs (text form, e.g.
 *      "model=trp renewal=weibull:s=2 trend=power:c=1,b=1.5 frailty=gamma:v=0.1",
 *      "model=virtual-age hazard=weibull:s=2,scale=10 policy=kijima2:dlaw=uniform")
 */
rs_model* rs_model_parse(const char* text);
char* rs_model_format(const rs_model* m);
void rs_model_free(rs_model* m);

/* ---- likelihood / fitting ---- */
int rs_loglik(const rs_model* m, const rs_dataset* d, double* out_total);
char* rs_loglik_json(const rs_model* m, const rs_dataset* d);

/* maximum likelihood over the free parameters of the model family given by
 * the template spec (its numeric values seed the optimizer) */
char* rs_fit_json(const rs_model* templ, const rs_dataset* d);

char* rs_fit_cube_json(const rs_dataset* d);
char* rs_fit_cube_text(const rs_dataset* d);

/* ---- simulation ---- */
rs_dataset* rs_simulate(const rs_model* m, int systems, double tau, uint64_t seed);

/* ---- trend tests; method one of: laplace, military-handbook,
 *      anderson-darling, combined-laplace, combined-military-handbook,
 *      lewis-robinson, mann, mann-pooled.
 *      resample_b > 0 recalibrates per-system methods under the RP null ---- */
char* rs_trend_test_json(const rs_dataset* d, const char* method, int resample_b,
                         uint64_t seed);

/* ---- diagnostics ---- */
char* rs_nelson_aalen_csv(const rs_dataset* d);
char* rs_ttt_plot_csv(const rs_dataset* d);
char* rs_plot_svg(const char* plot_csv, const char* title);
/* fits the template family, then reports time-change residual checks */
char* rs_residuals_json(const rs_model* templ, const rs_dataset* d);

/* ---- competing risks.
 *      family text: "family=independent marginals=weibull:s=2,scale=1;exponential:scale=0.5"
 *                   or "family=gumbel theta=0.5"
 *      policy text: "perfect-all" | "minimal-all" | "partial-repair" |
 *                   "agered-full:rho=0.3,0.5" | "agered-incr:rho=..." |
 *                   "equal-age:rho=..."
 *      labels: comma-separated component names matching dataset marks ---- */
rs_dataset* rs_cr_simulate(const char* family, const char* policy, const char* labels,
                           int systems, double tau, uint64_t seed);
char* rs_cr_loglik_json(const char* family, const char* policy, const char* labels,
                        const rs_dataset* d, const char* frailty_variances);

#ifdef __cplusplus
}
#endif
