#ifndef LEVY_SCL_H
#define LEVY_SCL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LsclStatus {
  LSCL_STATUS_OK = 0,
  LSCL_STATUS_NULL_POINTER = 1,
  LSCL_STATUS_INVALID_ARGUMENT = 2,
  LSCL_STATUS_VALIDATION = 3,
  LSCL_STATUS_CONTRACT = 4,
  LSCL_STATUS_NUMERICAL = 5,
  LSCL_STATUS_CFL = 6,
  LSCL_STATUS_BLOW_UP = 7,
  LSCL_STATUS_CONFIG = 8,
  LSCL_STATUS_IO = 9,
  LSCL_STATUS_BUFFER_TOO_SMALL = 10,
  LSCL_STATUS_PANIC = 11,
} LsclStatus;

typedef enum LsclNoiseShape {
  LSCL_NOISE_SHAPE_ZERO = 0,
  LSCL_NOISE_SHAPE_LINEAR = 1,
  LSCL_NOISE_SHAPE_TANH = 2,
} LsclNoiseShape;

typedef enum LsclFluxKind {
  /**
   * `speed · u`
   */
  LSCL_FLUX_KIND_LINEAR = 0,
  /**
   * `u²/2 + drift · u`
   */
  LSCL_FLUX_KIND_BURGERS = 1,
} LsclFluxKind;

typedef enum LsclNumericalFlux {
  LSCL_NUMERICAL_FLUX_ENGQUIST_OSHER = 0,
  LSCL_NUMERICAL_FLUX_GODUNOV = 1,
  LSCL_NUMERICAL_FLUX_LAX_FRIEDRICHS = 2,
} LsclNumericalFlux;

typedef struct LsclCoefficient LsclCoefficient;

typedef struct LsclConfig LsclConfig;

typedef struct LsclMeasure LsclMeasure;

typedef struct LsclPath LsclPath;

typedef struct LsclReport LsclReport;

/**
 * Grid, flux and solver settings for [`lscl_solve`].
 */
typedef struct LsclSolveParams {
  double x_min;
  double x_max;
  enum LsclFluxKind flux_kind;
  /**
   * Speed for a linear flux, drift for Burgers.
   */
  double flux_param;
  enum LsclNumericalFlux numerical_flux;
  double epsilon;
  double cfl;
  double max_dt;
  double horizon;
} LsclSolveParams;

/**
 * Result of [`lscl_fit_rate`].
 */
typedef struct LsclRateFit {
  double slope;
  double intercept;
  double max_residual;
} LsclRateFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lscl_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *lscl_last_error_message(void);

/**
 * Atomic measure `Σ weights[i] δ_{marks[i]}`, simulated exactly.
 *
 * # Safety
 * `marks` and `weights` must point to `n` readable doubles; `out` must be
 * writable.
 */
enum LsclStatus lscl_measure_atomic(const double *marks,
                                    const double *weights,
                                    size_t n,
                                    struct LsclMeasure **out_measure);

/**
 * Power-law measure `scale · |z|^{-1-alpha}` on `0 < z <= z_max`, mirrored
 * when `symmetric`; jumps below `cut` are compensated, not simulated.
 *
 * # Safety
 * `out_measure` must be writable.
 */
enum LsclStatus lscl_measure_power_law(double alpha,
                                       double scale,
                                       double z_max,
                                       bool symmetric,
                                       double cut,
                                       struct LsclMeasure **out_measure);

/**
 * `ν(|z| >= kappa)`.
 *
 * # Safety
 * `measure` must be a live handle and `out_value` writable.
 */
enum LsclStatus lscl_measure_intensity(const struct LsclMeasure *measure,
                                       double kappa,
                                       double *out_value);

/**
 * # Safety
 * `measure` must be null or a handle not yet freed.
 */
void lscl_measure_free(struct LsclMeasure *measure);

/**
 * Jump coefficient `scale · s(u) · (|z| ∧ 1)` with Lipschitz constant
 * `lambda_star` in `u`.
 *
 * # Safety
 * `out_coefficient` must be writable.
 */
enum LsclStatus lscl_coefficient_new(enum LsclNoiseShape shape,
                                     double scale,
                                     double lambda_star,
                                     struct LsclCoefficient **out_coefficient);

/**
 * Multiplies the coefficient by the Gaussian bump
 * `exp(-(x - center)² / (2 width²))`.
 *
 * # Safety
 * `coefficient` must be a live handle.
 */
enum LsclStatus lscl_coefficient_set_bump(struct LsclCoefficient *coefficient,
                                          double center,
                                          double width);

/**
 * `η(x, u; z)`.
 *
 * # Safety
 * `coefficient` must be a live handle and `out_value` writable.
 */
enum LsclStatus lscl_coefficient_eval(const struct LsclCoefficient *coefficient,
                                      double x,
                                      double u,
                                      double z,
                                      double *out_value);

/**
 * # Safety
 * `coefficient` must be null or a handle not yet freed.
 */
void lscl_coefficient_free(struct LsclCoefficient *coefficient);

/**
 * `∫_{|z|>=kappa} η(x, u; z) ν(dz)`.
 *
 * # Safety
 * Handles must be live and `out_value` writable.
 */
enum LsclStatus lscl_compensator_integral(const struct LsclCoefficient *coefficient,
                                          const struct LsclMeasure *measure,
                                          double kappa,
                                          double x,
                                          double u,
                                          double *out_value);

/**
 * `sup_u ∫ (η − σ)² / (1 + u²) ν(dz)` over `n_u` states of `[u_min, u_max]`.
 *
 * # Safety
 * Handles must be live; `out_value` writable; `out_argmax` may be null.
 */
enum LsclStatus lscl_noise_distance(const struct LsclCoefficient *eta,
                                    const struct LsclCoefficient *sigma,
                                    const struct LsclMeasure *measure,
                                    double u_min,
                                    double u_max,
                                    size_t n_u,
                                    double *out_value,
                                    double *out_argmax);

/**
 * Samples path `path_index` of the ensemble seeded by `seed` on `[0, horizon]`,
 * using the measure's own cut.
 *
 * # Safety
 * `measure` must be a live handle and `out_path` writable.
 */
enum LsclStatus lscl_path_sample(const struct LsclMeasure *measure,
                                 double horizon,
                                 uint64_t seed,
                                 uint64_t path_index,
                                 struct LsclPath **out_path);

/**
 * Number of jump events on the path.
 *
 * # Safety
 * `path` must be a live handle and `out_len` writable.
 */
enum LsclStatus lscl_path_len(const struct LsclPath *path, size_t *out_len);

/**
 * Copies event times and marks into caller buffers of length `capacity`.
 * Fails with `BufferTooSmall` when the path has more events.
 *
 * # Safety
 * `times` and `marks` must point to `capacity` writable doubles.
 */
enum LsclStatus lscl_path_events(const struct LsclPath *path,
                                 double *times,
                                 double *marks,
                                 size_t capacity);

/**
 * # Safety
 * `path` must be null or a handle not yet freed.
 */
void lscl_path_free(struct LsclPath *path);

/**
 * Integrates `n_cells` cell averages `u` in place from `t = 0` to
 * `params.horizon` against `path` on a periodic grid.
 *
 * # Safety
 * `params`, `coefficient`, `measure` and `path` must be live; `u` must
 * point to `n_cells` readable and writable doubles.
 */
enum LsclStatus lscl_solve(const struct LsclSolveParams *params,
                           const struct LsclCoefficient *coefficient,
                           const struct LsclMeasure *measure,
                           const struct LsclPath *path,
                           double *u,
                           size_t n_cells);

/**
 * Smoothed absolute value `β_ξ(r)`.
 *
 * # Safety
 * `out_value` must be writable.
 */
enum LsclStatus lscl_beta(double xi, double r, double *out_value);

/**
 * `β_ξ'(r)`.
 *
 * # Safety
 * `out_value` must be writable.
 */
enum LsclStatus lscl_beta_prime(double xi, double r, double *out_value);

/**
 * `β_ξ''(r)`.
 *
 * # Safety
 * `out_value` must be writable.
 */
enum LsclStatus lscl_beta_second(double xi, double r, double *out_value);

/**
 * Periodic total variation `Σ |u_{i+1} − u_i|`.
 *
 * # Safety
 * `values` must point to `n` readable doubles; `out_value` writable.
 */
enum LsclStatus lscl_bv_seminorm(const double *values, size_t n, double *out_value);

/**
 * Discrete `L^p` norm of cell averages on `[x_min, x_max)`; `p = INFINITY`
 * gives the max norm.
 *
 * # Safety
 * `values` must point to `n` readable doubles; `out_value` writable.
 */
enum LsclStatus lscl_lp_norm(double x_min,
                             double x_max,
                             const double *values,
                             size_t n,
                             double p,
                             double *out_value);

/**
 * Least-squares fit of `log e = slope · log h + intercept`.
 *
 * # Safety
 * `h` and `e` must point to `n` readable doubles; `out_fit` writable.
 */
enum LsclStatus lscl_fit_rate(const double *h,
                              const double *e,
                              size_t n,
                              struct LsclRateFit *out_fit);

/**
 * Parses and validates an experiment config from text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out_config` writable.
 */
enum LsclStatus lscl_config_parse(const char *text, struct LsclConfig **out_config);

/**
 * Overrides the ensemble size and seed.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum LsclStatus lscl_config_set_ensemble(struct LsclConfig *config, size_t paths, uint64_t seed);

/**
 * # Safety
 * `config` must be null or a handle not yet freed.
 */
void lscl_config_free(struct LsclConfig *config);

/**
 * Runs the experiment on `threads` workers (0 means all cores).
 *
 * # Safety
 * `config` must be a live handle and `out_report` writable.
 */
enum LsclStatus lscl_experiment_run(const struct LsclConfig *config,
                                    size_t threads,
                                    struct LsclReport **out_report);

/**
 * Whether every verdict of the report passed.
 *
 * # Safety
 * `report` must be a live handle and `out_passed` writable.
 */
enum LsclStatus lscl_report_passed(const struct LsclReport *report, bool *out_passed);

/**
 * Mean and standard error of the named report row.
 *
 * # Safety
 * `report` must be live, `name` NUL-terminated, `out_mean` writable and
 * `out_std_error` null or writable.
 */
enum LsclStatus lscl_report_stat(const struct LsclReport *report,
                                 const char *name,
                                 double *out_mean,
                                 double *out_std_error);

/**
 * Writes the CSV report files into `dir`.
 *
 * # Safety
 * `report` must be live and `dir` NUL-terminated.
 */
enum LsclStatus lscl_report_write(const struct LsclReport *report, const char *dir);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void lscl_report_free(struct LsclReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVY_SCL_H */
