/* C interface to the npbayes library.
 *
 * Every function returns an npb_status. On failure the message for the
 * calling thread is available from npb_last_error_message() until the next
 * failing call on that thread. Objects are opaque handles created by
 * npb_*_create / npb_*_sample style functions and released with the matching
 * npb_*_destroy (destroying NULL is a no-op). Output arrays are supplied by
 * the caller together with their capacity.
 */
#ifndef NPBAYES_H
#define NPBAYES_H

#include <stddef.h>
#include <stdint.h>

#if defined(NPB_BUILDING_LIBRARY)
#define NPB_API __attribute__((visibility("default")))
#else
#define NPB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum npb_status {
  NPB_OK = 0,
  NPB_ERR_DOMAIN = 1,
  NPB_ERR_INVALID_ARGUMENT = 2,
  NPB_ERR_NUMERICAL = 3,
  NPB_ERR_LIMIT = 4,
  NPB_ERR_UNSUPPORTED = 5,
  NPB_ERR_NULL_POINTER = 6,
  NPB_ERR_BUFFER_TOO_SMALL = 7,
  NPB_ERR_INTERNAL = 8
} npb_status;

NPB_API const char* npb_last_error_message(void);
NPB_API const char* npb_status_string(npb_status status);
NPB_API const char* npb_version(void);

/* ---- random numbers and special functions ---- */

typedef struct npb_rng npb_rng;

NPB_API npb_status npb_rng_create(uint64_t seed, npb_rng** out);
NPB_API void npb_rng_destroy(npb_rng* rng);
/* Independent child stream number `stream`. */
NPB_API npb_status npb_rng_split(const npb_rng* rng, uint64_t stream, npb_rng** out);
NPB_API npb_status npb_rng_uniform(npb_rng* rng, double* out);
NPB_API npb_status npb_sample_gamma(double shape, npb_rng* rng, double* out);
NPB_API npb_status npb_sample_beta(double a, double b, npb_rng* rng, double* out);

NPB_API npb_status npb_reg_inc_beta(double x, double a, double c, double* out);
NPB_API npb_status npb_log_gamma(double x, double* out);

/* ---- base distributions ---- */

typedef struct npb_base npb_base;

NPB_API npb_status npb_base_uniform(double lo, double hi, npb_base** out);
NPB_API npb_status npb_base_normal(double mean, double sd, npb_base** out);
NPB_API npb_status npb_base_empirical(const double* points, size_t n, npb_base** out);
NPB_API void npb_base_destroy(npb_base* base);
NPB_API npb_status npb_base_cdf(const npb_base* base, double x, double* out);
NPB_API npb_status npb_base_quantile(const npb_base* base, double p, double* out);
NPB_API npb_status npb_base_mean(const npb_base* base, double* out);

/* ---- Dirichlet process ---- */

typedef struct npb_dp npb_dp;
typedef struct npb_measure npb_measure;

/* Dirichlet process with concentration b: sticks Beta(1, b). */
NPB_API npb_status npb_dp_create(double b, const npb_base* base, npb_dp** out);
/* General stick law Beta(stick_a, stick_b). */
NPB_API npb_status npb_dp_create_sticks(double b, const npb_base* base, double stick_a, double stick_b,
                                        npb_dp** out);
NPB_API void npb_dp_destroy(npb_dp* dp);
NPB_API npb_status npb_dp_concentration(const npb_dp* dp, double* out);
/* Posterior process given data: concentration b + n, base a mixture. */
NPB_API npb_status npb_dp_posterior(const npb_dp* dp, const double* data, size_t n, npb_dp** out);

/* Law of P(A) for a set with P0(A) = p0a: Beta(b p0a, b (1 - p0a)), or a
 * point mass when p0a is 0 or 1 (then alpha = beta = 0). */
typedef struct npb_set_law {
  double alpha;
  double beta;
  double mean;
  double variance;
  int degenerate;
} npb_set_law;

NPB_API npb_status npb_dp_set_law(const npb_dp* dp, double p0a, npb_set_law* out);

NPB_API npb_status npb_dp_finite_sample(const npb_dp* dp, uint64_t m, npb_rng* rng, npb_measure** out);
NPB_API npb_status npb_dp_stick_sample(const npb_dp* dp, double truncation_eps, npb_rng* rng,
                                       npb_measure** out);
/* Random number of atoms M = 1 + Poisson(mean). */
NPB_API npb_status npb_dp_random_m_sample(const npb_dp* dp, double poisson_mean, npb_rng* rng,
                                          npb_measure** out);

NPB_API void npb_measure_destroy(npb_measure* measure);
NPB_API npb_status npb_measure_size(const npb_measure* measure, size_t* out);
NPB_API npb_status npb_measure_atoms(const npb_measure* measure, double* out, size_t capacity);
NPB_API npb_status npb_measure_weights(const npb_measure* measure, double* out, size_t capacity);
NPB_API npb_status npb_measure_residual(const npb_measure* measure, double* out);
NPB_API npb_status npb_measure_mass_below(const npb_measure* measure, double x, double* out);
/* Integral of x dP, renormalized over the realized mass. */
NPB_API npb_status npb_measure_mean(const npb_measure* measure, double* out);

/* ---- random means ---- */

typedef enum npb_integrand_kind {
  NPB_G_IDENTITY = 0,
  NPB_G_CONSTANT = 1,
  NPB_G_POWER = 2
} npb_integrand_kind;

typedef struct npb_integrand {
  npb_integrand_kind kind;
  double param; /* constant value or exponent */
} npb_integrand;

typedef enum npb_moment_base {
  NPB_MOMENTS_UNIFORM = 0, /* p1 = lo, p2 = hi */
  NPB_MOMENTS_NORMAL = 1,  /* p1 = mean, p2 = sd */
  NPB_MOMENTS_POINT = 2    /* p1 = location */
} npb_moment_base;

typedef enum npb_arithmetic { NPB_ARITH_AUTO = 0, NPB_ARITH_EXACT = 1, NPB_ARITH_FLOAT = 2 } npb_arithmetic;

/* Central moments 0..p_max of the random mean; out has p_max + 1 entries. */
NPB_API npb_status npb_central_moments(npb_moment_base base, double p1, double p2, double stick_a,
                                       double stick_b, int p_max, npb_arithmetic arithmetic, double* out);
NPB_API npb_status npb_empirical_central_moments(const double* samples, size_t n, double centre, int p_max,
                                                 double* out);

/* theta_k = B_k Y_k + (1 - B_k) theta_(k-1), Y = g(X), X from the base;
 * writes steps - burn_in values. */
NPB_API npb_status npb_mean_chain(const npb_dp* dp, npb_integrand g, size_t steps, size_t burn_in, npb_rng* rng,
                                  double* out, size_t capacity);

typedef struct npb_transform_report {
  double u;
  double lhs_mc;
  double mc_se;
  double rhs_exact;
} npb_transform_report;

NPB_API npb_status npb_transform_rhs(const npb_dp* dp, npb_integrand g, double u, size_t quad_points,
                                     double* out);
NPB_API npb_status npb_transform_check(const npb_dp* dp, npb_integrand g, double u, size_t n_sim,
                                       size_t quad_points, npb_rng* rng, npb_transform_report* out);

/* ---- quantiles ---- */

typedef struct npb_qlaw npb_qlaw;
typedef struct npb_density npb_density;

/* Point masses of the b -> 0 posterior of Q(y) on the order statistics. */
NPB_API npb_status npb_noninf_point_masses(double y, size_t n, double* out, size_t capacity);
/* Data need not be sorted but must be finite and distinct. */
NPB_API npb_status npb_bernstein_quantile(const double* data, size_t n, double y, double* out);
NPB_API npb_status npb_bernstein_quantile_derivative(const double* data, size_t n, double y, double* out);
NPB_API npb_status npb_quantile_posterior_mean(const double* data, size_t n, double y, double b,
                                               const npb_base* f0, double* out);
NPB_API npb_status npb_prior_quantile_cdf(double y, double x, double b, const npb_base* f0, double* out);

NPB_API npb_status npb_qlaw_create(const double* data, size_t n, double y, double b, const npb_base* f0,
                                   npb_qlaw** out);
NPB_API void npb_qlaw_destroy(npb_qlaw* law);
NPB_API npb_status npb_qlaw_cdf(const npb_qlaw* law, double x, double* out);
NPB_API npb_status npb_qlaw_continuous_mass(const npb_qlaw* law, double* out);
NPB_API npb_status npb_qlaw_mean(const npb_qlaw* law, double* out);

NPB_API npb_status npb_density_create(const double* data, size_t n, npb_density** out);
NPB_API void npb_density_destroy(npb_density* density);
NPB_API npb_status npb_density_eval(const npb_density* density, double x, double* out);
NPB_API npb_status npb_density_cdf(const npb_density* density, double x, double* out);

/* ---- quantile pyramids ---- */

typedef enum npb_level_kind { NPB_LEVEL_UNIFORM = 0, NPB_LEVEL_BETA = 1 } npb_level_kind;

typedef struct npb_level_density {
  npb_level_kind kind;
  double alpha;
  double beta;
} npb_level_density;

typedef enum npb_pyramid_likelihood { NPB_PYR_INTERPOLATION = 0, NPB_PYR_SUBSTITUTE = 1 } npb_pyramid_likelihood;

typedef struct npb_pyramid_options {
  size_t iterations;
  size_t burn_in;
  size_t thin;
  double proposal_scale;
} npb_pyramid_options;

typedef struct npb_pyramid_chain npb_pyramid_chain;

NPB_API npb_pyramid_options npb_pyramid_default_options(void);
/* Node values k / 2^depth, k = 1..2^depth - 1. */
NPB_API npb_status npb_pyramid_sample_prior(int depth, npb_level_density h, npb_rng* rng, double* out,
                                            size_t capacity);
NPB_API npb_status npb_pyramid_log_prior(int depth, const double* values, npb_level_density h, double* out);
NPB_API npb_status npb_pyramid_loglik(int depth, const double* values, const double* data, size_t n,
                                      npb_pyramid_likelihood likelihood, double* out);
NPB_API npb_status npb_pyramid_sample(int depth, npb_level_density h, const double* data, size_t n,
                                      npb_pyramid_likelihood likelihood, const npb_pyramid_options* options,
                                      npb_rng* rng, npb_pyramid_chain** out);
NPB_API void npb_pyramid_chain_destroy(npb_pyramid_chain* chain);
NPB_API npb_status npb_pyramid_chain_size(const npb_pyramid_chain* chain, size_t* out);
NPB_API npb_status npb_pyramid_chain_draw(const npb_pyramid_chain* chain, size_t index, size_t* iteration,
                                          double* values, size_t capacity);
NPB_API npb_status npb_pyramid_chain_acceptance(const npb_pyramid_chain* chain, double* out);

/* ---- frailty ---- */

typedef enum npb_jump_kind { NPB_JUMP_GAMMA = 0, NPB_JUMP_POINT = 1, NPB_JUMP_BETA_RISK = 2 } npb_jump_kind;

/* Z(t) = sum theta G_j over a Poisson process with Lambda(t) = kappa t^exponent.
 * gamma: p1 = shape; point: p1 = size; beta_risk: G = -log(1 - R), R ~ Beta(p1, p2). */
typedef struct npb_frailty_spec {
  double theta;
  npb_jump_kind jump;
  double jump_p1;
  double jump_p2;
  double kappa;
  double exponent;
} npb_frailty_spec;

typedef struct npb_path npb_path;

NPB_API npb_status npb_frailty_simulate(const npb_frailty_spec* spec, double t_max, npb_rng* rng, npb_path** out);
NPB_API void npb_path_destroy(npb_path* path);
NPB_API npb_status npb_path_size(const npb_path* path, size_t* out);
NPB_API npb_status npb_path_times(const npb_path* path, double* out, size_t capacity);
NPB_API npb_status npb_path_levels(const npb_path* path, double* out, size_t capacity);
NPB_API npb_status npb_path_damage(const npb_path* path, double t, double* out);

NPB_API npb_status npb_frailty_thinning(const npb_frailty_spec* spec, double* out);
NPB_API npb_status npb_frailty_survival(const npb_frailty_spec* spec, double t, double* out);
NPB_API npb_status npb_frailty_hazard(const npb_frailty_spec* spec, double s, double* out);

typedef enum npb_hazard_structure { NPB_HAZARD_COX = 0, NPB_HAZARD_BETA_MULTIPLIER = 1 } npb_hazard_structure;

/* Covariates are row-major n x p. beta and (for the beta multiplier) gamma
 * have p entries. Baseline Lambda0(t) = kappa t^exponent. */
typedef struct npb_regression_spec {
  npb_hazard_structure structure;
  double kappa;
  double exponent;
  const double* beta;
  size_t p;
  double theta;
  npb_jump_kind jump;
  double jump_p1;
  double jump_p2;
  const double* gamma;
  double c;
} npb_regression_spec;

/* Hazard h_i(s) and survival S_i(s) for every individual. */
NPB_API npb_status npb_regression_hazards(const npb_regression_spec* spec, const double* covariates, size_t n,
                                          double s, double* hazard, double* survival);

/* ---- local regression ---- */

typedef enum npb_kernel {
  NPB_KERNEL_UNIFORM = 0,
  NPB_KERNEL_EPANECHNIKOV = 1,
  NPB_KERNEL_TRIANGULAR = 2,
  NPB_KERNEL_BIWEIGHT = 3
} npb_kernel;

typedef struct npb_local_prior npb_local_prior;
typedef struct npb_local_fit npb_local_fit;

/* Defaults: m0 = 0, w0 = 0. */
NPB_API npb_status npb_local_prior_create(double sigma, npb_local_prior** out);
NPB_API void npb_local_prior_destroy(npb_local_prior* prior);
NPB_API npb_status npb_local_prior_m0_linear(npb_local_prior* prior, double xi0, double xi1);
NPB_API npb_status npb_local_prior_m0_table(npb_local_prior* prior, const double* xs, const double* values,
                                            size_t n);
NPB_API npb_status npb_local_prior_w0_constant(npb_local_prior* prior, double w0);
NPB_API npb_status npb_local_prior_w0_table(npb_local_prior* prior, const double* xs, const double* values,
                                            size_t n);

NPB_API npb_status npb_kernel_weights(double x, const double* xs, const double* ys, size_t n, double h,
                                      npb_kernel kernel, double* weights, double* s0);
NPB_API npb_status npb_kernel_density(double x, const double* xs, size_t n, double h, npb_kernel kernel,
                                      double* out);
NPB_API npb_status npb_local_constant(double x, const double* xs, const double* ys, size_t n, double h,
                                      npb_kernel kernel, double* out);
NPB_API npb_status npb_local_log_likelihood(double x, const double* xs, const double* ys, size_t n, double h,
                                            npb_kernel kernel, double a, double sigma, double* out);
NPB_API npb_status npb_local_posterior(double x, const double* xs, const double* ys, size_t n, double h,
                                       npb_kernel kernel, const npb_local_prior* prior, double* mean,
                                       double* variance);
NPB_API npb_status npb_plugin_sigma(const double* xs, const double* ys, size_t n, double h, npb_kernel kernel,
                                    double* out);

typedef struct npb_fit_options {
  int empirical_bayes;
  int hierarchical;
  double xi_mean[2];
  double xi_cov[4]; /* row-major 2 x 2 */
  size_t n_draws;
} npb_fit_options;

/* rng may be NULL unless options->hierarchical is set. */
NPB_API npb_status npb_local_fit_create(const double* xs, const double* ys, size_t n, const double* grid,
                                        size_t grid_size, double h, npb_kernel kernel, const npb_local_prior* prior,
                                        const npb_fit_options* options, npb_rng* rng, npb_local_fit** out);
NPB_API void npb_local_fit_destroy(npb_local_fit* fit);
NPB_API npb_status npb_local_fit_size(const npb_local_fit* fit, size_t* out);

typedef struct npb_local_fit_row {
  double x;
  double mean; /* NaN where undefined */
  double sd;
  double s0;
  double m_tilde; /* NaN in a gap */
  int gap;
} npb_local_fit_row;

NPB_API npb_status npb_local_fit_row_at(const npb_local_fit* fit, size_t index, npb_local_fit_row* out);
/* Plug-in prior precision, when it was used; *has_value is 0 otherwise. */
NPB_API npb_status npb_local_fit_w0_hat(const npb_local_fit* fit, int* has_value, double* out);

/* ---- envelopes ---- */

/* Residual draws are row-major: draws x n. Pass NaN as w_override for w = b / (b + n). */
NPB_API npb_status npb_predictive_cdf(const double* residuals, size_t draws, size_t n, double b,
                                      const npb_base* g0, double w_override, const double* t, size_t count,
                                      double* out);
NPB_API npb_status npb_rising_factorial_log(double x, uint64_t m, double* out);
NPB_API npb_status npb_control_log_factor(const uint64_t* counts, const double* z, size_t k, double b, double* out);
/* Cells (-inf, c_1], (c_1, c_2], ..., (c_(k-1), inf); counts has ncuts + 1 entries. */
NPB_API npb_status npb_partition_counts(const double* cuts, size_t ncuts, const double* residuals, size_t n,
                                        uint64_t* counts);
/* Covariates row-major n x p. */
NPB_API npb_status npb_standardized_residuals(const double* y, const double* covariates, size_t n, size_t p,
                                              const double* beta, double sigma, double* out);

#ifdef __cplusplus
}
#endif

#endif
