/* C interface to the phiqkd library. */

#ifndef PHIQKD_H
#define PHIQKD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every C API call.
 */
typedef enum PhiqkdStatus {
  PHIQKD_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PHIQKD_STATUS_NULL_POINTER = 1,
  /**
   * An argument was outside its domain.
   */
  PHIQKD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation has no result for these inputs (for example a
   * missing crossing).
   */
  PHIQKD_STATUS_NO_RESULT = 3,
  /**
   * Fewer sifted bits than the parameter-estimation sample needs.
   */
  PHIQKD_STATUS_INSUFFICIENT_SIFTED_BITS = 4,
  /**
   * An internal invariant failed.
   */
  PHIQKD_STATUS_INTERNAL = 5,
} PhiqkdStatus;

/**
 * Which key-rate figure to optimize.
 */
typedef enum PhiqkdRateMode {
  PHIQKD_RATE_MODE_ASYMPTOTIC = 0,
  PHIQKD_RATE_MODE_FINITE = 1,
  PHIQKD_RATE_MODE_COMPOSABLE = 2,
} PhiqkdRateMode;

/**
 * Opaque tilted-measurement handle.
 */
typedef struct PhiqkdPovm PhiqkdPovm;

/**
 * Opaque sweep-result handle.
 */
typedef struct PhiqkdSweep PhiqkdSweep;

/**
 * Finite-key security budget.
 */
typedef struct PhiqkdFiniteKeyParams {
  uint64_t n_total;
  uint64_t n_test;
  double eps_pe;
  double eps_sec;
  double eps_cor;
  double ec_efficiency;
} PhiqkdFiniteKeyParams;

/**
 * Correct, incorrect, and inconclusive outcome probabilities.
 */
typedef struct PhiqkdProbs {
  double p_s;
  double p_e;
  double p_q;
} PhiqkdProbs;

/**
 * Flattened key-rate report at one operating point.
 */
typedef struct PhiqkdKeyRateReport {
  double theta;
  double phi;
  double p_s;
  double p_e;
  double p_q;
  double eta;
  double qber;
  double delta;
  double q_worst;
  double h_qworst;
  double r_asymptotic;
  double r_finite;
  double key_length;
  double r_secure;
  bool q_worst_clamped;
  bool positive_asymptotic;
  bool positive_finite;
  bool positive_secure;
} PhiqkdKeyRateReport;

/**
 * Tally summary of one simulated protocol run.
 */
typedef struct PhiqkdSimulationSummary {
  uint64_t n_correct;
  uint64_t n_incorrect;
  uint64_t n_inconclusive;
  uint64_t n_sifted;
  double q_hat;
  double delta;
  double q_worst_hat;
  uint64_t key_length;
  double r_secure;
} PhiqkdSimulationSummary;

/**
 * One overlap angle of a baseline-comparison sweep. Optional fields are
 * paired with presence flags.
 */
typedef struct PhiqkdSweepRow {
  double theta;
  double phi_opt;
  double r_phiqkd;
  double r_b92;
  double difference;
  double improvement;
  bool has_improvement;
  double phi_bound;
  bool has_phi_bound;
  double coverage;
} PhiqkdSweepRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a NUL-terminated static string.
 */
const char *phiqkd_version(void);

/**
 * Human-readable description of a status code, as a static string.
 */
const char *phiqkd_status_message(enum PhiqkdStatus status);

/**
 * Default finite-key budget (N = 10^6, n = 10^5, eps = 1e-10 each,
 * f = 1.15).
 *
 * # Safety
 * `out` must point to a writable `PhiqkdFiniteKeyParams`.
 */
enum PhiqkdStatus phiqkd_finite_key_defaults(struct PhiqkdFiniteKeyParams *out);

/**
 * Shannon binary entropy in bits.
 *
 * # Safety
 * `out` must point to a writable `double`.
 */
enum PhiqkdStatus phiqkd_binary_entropy(double x, double *out);

/**
 * Hoeffding correction `sqrt(ln(2/eps_pe) / (2 n_test))`.
 *
 * # Safety
 * `out` must point to a writable `double`.
 */
enum PhiqkdStatus phiqkd_hoeffding_delta(uint64_t n_test, double eps_pe, double *out);

/**
 * Closed-form outcome probabilities at one operating point.
 *
 * # Safety
 * `out` must point to a writable `PhiqkdProbs`.
 */
enum PhiqkdStatus phiqkd_outcome_probs(double theta, double phi, struct PhiqkdProbs *out);

/**
 * Minimum-error discrimination probabilities for the pair.
 *
 * # Safety
 * `out` must point to a writable `PhiqkdProbs`.
 */
enum PhiqkdStatus phiqkd_helstrom_probs(double theta, struct PhiqkdProbs *out);

/**
 * Accuracy and efficiency (percent) at one operating point.
 *
 * # Safety
 * `chi` and `zeta` must point to writable `double`s.
 */
enum PhiqkdStatus phiqkd_metrics(double theta, double phi, double *chi, double *zeta);

/**
 * Largest admissible tilt for the pair.
 *
 * # Safety
 * `out` must point to a writable `double`.
 */
enum PhiqkdStatus phiqkd_phi_med(double theta, double *out);

/**
 * Tilt where correct and inconclusive probabilities coincide.
 *
 * # Safety
 * `out` must point to a writable `double`.
 */
enum PhiqkdStatus phiqkd_find_ctp(double theta, double *out);

/**
 * Tilt where incorrect and inconclusive probabilities coincide.
 *
 * # Safety
 * `out` must point to a writable `double`.
 */
enum PhiqkdStatus phiqkd_find_erp(double theta, double *out);

/**
 * Full key-rate report at one operating point.
 *
 * # Safety
 * `params` and `out` must point to valid structs.
 */
enum PhiqkdStatus phiqkd_key_rate_report(double theta,
                                         double phi,
                                         const struct PhiqkdFiniteKeyParams *params,
                                         struct PhiqkdKeyRateReport *out);

/**
 * Composable rate of the untilted baseline under the same budget.
 *
 * # Safety
 * `params` and `out` must point to valid values.
 */
enum PhiqkdStatus phiqkd_b92_secure_rate(double theta,
                                         const struct PhiqkdFiniteKeyParams *params,
                                         double *out);

/**
 * Tilt maximizing the requested rate, with the achieved rate.
 *
 * # Safety
 * `params`, `phi_opt`, and `rate` must point to valid values.
 */
enum PhiqkdStatus phiqkd_optimize_phi(double theta,
                                      enum PhiqkdRateMode mode,
                                      const struct PhiqkdFiniteKeyParams *params,
                                      double *phi_opt,
                                      double *rate);

/**
 * Tilt past the optimum where the composable rate falls back to the
 * baseline. Returns `NoResult` when that crossing does not exist.
 *
 * # Safety
 * `params` and `out` must point to valid values.
 */
enum PhiqkdStatus phiqkd_phi_bound(double theta,
                                   const struct PhiqkdFiniteKeyParams *params,
                                   double *out);

/**
 * Percentage of the tilt domain where the composable rate beats the
 * baseline.
 *
 * # Safety
 * `params` and `out` must point to valid values.
 */
enum PhiqkdStatus phiqkd_coverage(double theta,
                                  const struct PhiqkdFiniteKeyParams *params,
                                  double *out);

/**
 * Builds the tilted measurement and returns an opaque handle.
 *
 * # Safety
 * `out` must point to a writable handle pointer. The handle must be
 * released with [`phiqkd_povm_free`].
 */
enum PhiqkdStatus phiqkd_povm_new(double theta, double phi, struct PhiqkdPovm **out);

/**
 * Copies element `index` (0 = identifies the first signal, 1 = the second,
 * 2 = inconclusive) into `out` as row-major `[re, im]` pairs, 8 doubles.
 *
 * # Safety
 * `handle` must come from [`phiqkd_povm_new`] and `out` must point to at
 * least 8 writable doubles.
 */
enum PhiqkdStatus phiqkd_povm_element(const struct PhiqkdPovm *handle, uint32_t index, double *out);

/**
 * Releases a measurement handle. Null is ignored.
 *
 * # Safety
 * `handle` must come from [`phiqkd_povm_new`] and not be freed twice.
 */
void phiqkd_povm_free(struct PhiqkdPovm *handle);

/**
 * Runs the seeded protocol simulation.
 *
 * # Safety
 * `params` and `out` must point to valid values.
 */
enum PhiqkdStatus phiqkd_simulate(double theta,
                                  double phi,
                                  const struct PhiqkdFiniteKeyParams *params,
                                  uint64_t seed,
                                  struct PhiqkdSimulationSummary *out);

/**
 * Samples the dilation circuit; writes counts for the labels 00, 01, 10.
 *
 * # Safety
 * `counts` must point to at least 3 writable `uint64_t`s.
 */
enum PhiqkdStatus phiqkd_dilation_histogram(double theta,
                                            double phi,
                                            uint64_t seed,
                                            uint64_t shots,
                                            uint64_t *counts);

/**
 * Runs a baseline-comparison sweep over `points` overlap angles uniformly
 * spanning `(theta_lo, theta_hi]` and returns an opaque handle.
 *
 * # Safety
 * `params` and `out` must point to valid values. The handle must be
 * released with [`phiqkd_sweep_free`].
 */
enum PhiqkdStatus phiqkd_sweep_new(double theta_lo,
                                   double theta_hi,
                                   size_t points,
                                   const struct PhiqkdFiniteKeyParams *params,
                                   struct PhiqkdSweep **out);

/**
 * Number of rows held by a sweep handle.
 *
 * # Safety
 * `handle` must come from [`phiqkd_sweep_new`].
 */
size_t phiqkd_sweep_len(const struct PhiqkdSweep *handle);

/**
 * Copies row `index` out of a sweep handle.
 *
 * # Safety
 * `handle` must come from [`phiqkd_sweep_new`] and `out` must point to a
 * writable `PhiqkdSweepRow`.
 */
enum PhiqkdStatus phiqkd_sweep_row(const struct PhiqkdSweep *handle,
                                   size_t index,
                                   struct PhiqkdSweepRow *out);

/**
 * Releases a sweep handle. Null is ignored.
 *
 * # Safety
 * `handle` must come from [`phiqkd_sweep_new`] and not be freed twice.
 */
void phiqkd_sweep_free(struct PhiqkdSweep *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHIQKD_H */
