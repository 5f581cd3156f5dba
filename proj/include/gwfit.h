/* gwfit: Gaussian random fields on perturbed grids with compactly supported
 * covariances, truncated maximum likelihood, and covariance tapering.
 *
 * C API over the C++ core: opaque handles, integer status codes, and a
 * thread-local error message. Every function returns GWFIT_OK on success.
 */
#ifndef GWFIT_H
#define GWFIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  GWFIT_OK = 0,
  GWFIT_ERR_INVALID = 1,  /* bad arguments or domain violations */
  GWFIT_ERR_NUMERIC = 2,  /* factorization/quadrature/optimization failure */
  GWFIT_ERR_IO = 3,       /* file errors */
  GWFIT_ERR_CONFIG = 4    /* experiment configuration rejected */
} gwfit_status;

/* Message for the most recent failure on this thread. */
const char* gwfit_last_error(void);

const char* gwfit_version(void);

/* ---- sites ---------------------------------------------------------- */

typedef struct gwfit_grid gwfit_grid;

gwfit_status gwfit_grid_generate(int dim, double tau, int n, uint64_t seed,
                                 gwfit_grid** out);
gwfit_status gwfit_grid_read_csv(const char* path, gwfit_grid** out);
gwfit_status gwfit_grid_read_binary(const char* path, gwfit_grid** out);
void gwfit_grid_free(gwfit_grid* g);

int gwfit_grid_size(const gwfit_grid* g);
int gwfit_grid_dim(const gwfit_grid* g);
/* buf must hold n*dim doubles, row-major */
gwfit_status gwfit_grid_coords(const gwfit_grid* g, double* buf, size_t len);
gwfit_status gwfit_grid_min_spacing(const gwfit_grid* g, double* out);
gwfit_status gwfit_grid_write_csv(const gwfit_grid* g, const char* path);
gwfit_status gwfit_grid_write_binary(const gwfit_grid* g, const char* path);

/* ---- covariance models ---------------------------------------------- */

typedef struct gwfit_model gwfit_model;

/* Exact generalized Wendland family with fixed smoothness (nu, kappa). */
gwfit_status gwfit_model_wendland(double nu, double kappa, int dim, gwfit_model** out);
/* One of "truncation", "bernstein", "linear-interp", "nugget" with the
 * default schedules at fidelity m; beta_max calibrates the schedules. */
gwfit_status gwfit_model_wendland_approx(double nu, double kappa, int dim,
                                         const char* family, int m, double beta_max,
                                         gwfit_model** out);
/* Matern (smoothness one of 0.5, 1.5, 2.5) times a fixed Wendland taper with
 * range beta0; taper_family may be NULL for the exact taper. */
gwfit_status gwfit_model_tapered_matern(double smoothness, double taper_beta0,
                                        double taper_nu, double taper_kappa, int dim,
                                        const char* taper_family, int taper_m,
                                        gwfit_model** out);
void gwfit_model_free(gwfit_model* m);

/* Covariance value at lag t under parameters theta = (sigma2, beta|range). */
gwfit_status gwfit_model_value(const gwfit_model* m, double sigma2, double beta,
                               double t, double* out);

/* Pointwise Wendland evaluations (no handle needed). */
gwfit_status gwfit_wendland_value(double nu, double kappa, int dim, double sigma2,
                                  double beta, double t, double* out);
gwfit_status gwfit_wendland_spectral_density(double nu, double kappa, int dim,
                                             double sigma2, double beta, double s_norm,
                                             double* out);

/* ---- simulation ------------------------------------------------------ */

/* out must hold replicates*n doubles, row-major (replicate index first). */
gwfit_status gwfit_simulate(const gwfit_grid* g, const gwfit_model* m, double sigma2,
                            double beta, int replicates, uint64_t seed, double* out,
                            size_t len);

/* ---- truncated-ML fitting -------------------------------------------- */

typedef struct gwfit_fit_result gwfit_fit_result;

gwfit_status gwfit_fit(const gwfit_grid* g, const gwfit_model* m, const double* data,
                       size_t data_len, double sigma2_min, double sigma2_max,
                       double beta_min, double beta_max, int starts,
                       gwfit_fit_result** out);
void gwfit_fit_result_free(gwfit_fit_result* r);

gwfit_status gwfit_fit_result_theta(const gwfit_fit_result* r, double* sigma2,
                                    double* beta);
gwfit_status gwfit_fit_result_objective(const gwfit_fit_result* r, double* out);
int gwfit_fit_result_converged(const gwfit_fit_result* r);
/* row-major 2x2 */
gwfit_status gwfit_fit_result_fisher(const gwfit_fit_result* r, double* out4);
gwfit_status gwfit_fit_result_asymp_cov(const gwfit_fit_result* r, double* out4);
/* JSON document (theta_hat, objective, fisher, cov, trace). Returns the
 * number of bytes that were (or would be) written, excluding the NUL. */
long gwfit_fit_result_json(const gwfit_fit_result* r, char* buf, size_t cap);

/* ---- experiments ------------------------------------------------------ */

/* Writes the experiment kind ("simulate", "fit", ...) into buf. */
gwfit_status gwfit_experiment_kind(const char* config_path, char* buf, size_t cap);

/* Writes the validation report into buf (truncating if needed) and stores
 * the violation count in n_violations. A syntactically broken config file
 * returns GWFIT_ERR_CONFIG. */
gwfit_status gwfit_experiment_validate(const char* config_path, char* buf, size_t cap,
                                       int* n_violations);

/* Runs the experiment described by the config file. exit_code receives the
 * process-style code: 0 ok, 2 invalid config, 3 numeric failures. Overrides
 * apply when non-NULL / nonzero. */
gwfit_status gwfit_experiment_run(const char* config_path, const char* out_dir,
                                  int threads, int has_seed, uint64_t seed,
                                  int* exit_code);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GWFIT_H */
