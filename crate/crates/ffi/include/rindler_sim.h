/* C interface to the rindler-sim accelerated-oscillator-chain simulator. */

#ifndef RINDLER_SIM_H
#define RINDLER_SIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum RsimStatus {
  /**
   * Success.
   */
  RSIM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  RSIM_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  RSIM_STATUS_INVALID_UTF8 = 2,
  /**
   * The config was rejected (schema, unknown keys, parameter ranges).
   */
  RSIM_STATUS_CONFIG_ERROR = 3,
  /**
   * The computation failed; see `rsim_last_error`.
   */
  RSIM_STATUS_RUN_ERROR = 4,
  /**
   * A panic was caught behind the boundary; see `rsim_last_error`.
   */
  RSIM_STATUS_PANIC = 5,
} RsimStatus;

/**
 * A finished scenario run: report plus series, behind an opaque handle.
 */
typedef struct RsimRun RsimRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The last error message of the current thread, or null when the last
 * call succeeded. Free with `rsim_string_free`.
 */
char *rsim_last_error(void);

/**
 * Run a scenario from a JSON config (see the project README for the
 * schema). Infeasible parameter sets still yield a run whose report
 * carries the refusal; only config errors and internal failures return a
 * non-Ok status. On success `*out_run` owns the result; release it with
 * `rsim_run_free`.
 *
 * # Safety
 * `config_json` must point to a NUL-terminated string and `out_run` to a
 * writable pointer slot; both must stay valid for the duration of the
 * call.
 */
enum RsimStatus rsim_run_scenario(const char *config_json, struct RsimRun **out_run);

/**
 * Whether every assertion of the run passed (false for refusals).
 *
 * # Safety
 * `run` must be a live handle from `rsim_run_scenario`.
 */
bool rsim_run_passed(const struct RsimRun *run);

/**
 * The serialized report; owned by the handle, do not free separately.
 *
 * # Safety
 * `run` must be a live handle from `rsim_run_scenario`.
 */
const char *rsim_run_report_json(const struct RsimRun *run);

/**
 * The series CSV; owned by the handle, do not free separately.
 *
 * # Safety
 * `run` must be a live handle from `rsim_run_scenario`.
 */
const char *rsim_run_series_csv(const struct RsimRun *run);

/**
 * Release a run handle.
 *
 * # Safety
 * `run` must be a handle from `rsim_run_scenario` not yet freed; null is
 * a no-op.
 */
void rsim_run_free(struct RsimRun *run);

/**
 * Release a string returned by `rsim_last_error`.
 *
 * # Safety
 * `text` must come from this library and not have been freed; null is a
 * no-op.
 */
void rsim_string_free(char *text);

/**
 * Classical normal-mode frequencies nu_plus >= nu_minus for field
 * wavenumber `wavenumber`, chain frequency `omega`, wave speed
 * `light_speed` and coupling `coupling`.
 *
 * # Safety
 * `nu_plus` and `nu_minus` must point to writable doubles.
 */
enum RsimStatus rsim_classical_dispersion(double omega,
                                          double wavenumber,
                                          double light_speed,
                                          double coupling,
                                          double *nu_plus,
                                          double *nu_minus);

/**
 * Classical Rabi frequency |nu_plus| - |nu_minus|.
 *
 * # Safety
 * `rabi` must point to a writable double.
 */
enum RsimStatus rsim_classical_rabi(double omega,
                                    double wavenumber,
                                    double light_speed,
                                    double coupling,
                                    double *rabi);

/**
 * Heisenberg-picture mean occupations of the single chain started in the
 * Minkowski vacuum: n_sigma = g^2/(1-g^2) sin^2(g tau) for the collective
 * chain mode and the cos^2 partner for the resonant Rindler mode.
 *
 * # Safety
 * `n_sigma` and `n_b1` must point to writable doubles.
 */
enum RsimStatus rsim_heisenberg_numbers(double gamma,
                                        double g,
                                        double tau,
                                        double *n_sigma,
                                        double *n_b1);

/**
 * Library version as a static string; do not free.
 */
const char *rsim_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RINDLER_SIM_H */
