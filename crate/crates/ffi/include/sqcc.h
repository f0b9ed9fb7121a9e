/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef SQCC_H
#define SQCC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SqccStatus {
  SQCC_STATUS_OK = 0,
  SQCC_STATUS_NULL_POINTER = 1,
  SQCC_STATUS_INVALID_ARGUMENT = 2,
  SQCC_STATUS_DOMAIN = 3,
  SQCC_STATUS_NO_CONVERGENCE = 4,
  SQCC_STATUS_NUMERIC = 5,
  SQCC_STATUS_PHYSICALITY = 6,
  SQCC_STATUS_PANIC = 7,
} SqccStatus;

typedef enum SqccStrategy {
  SQCC_STRATEGY_B_PRESERVING = 0,
  SQCC_STRATEGY_C_PRESERVING = 1,
} SqccStrategy;

// Monte Carlo shots plus the protocol that produced them.
typedef struct SqccBatch SqccBatch;

// Channel, reconciliation and finite-size settings shared by the rate calls.
typedef struct SqccScenario SqccScenario;

typedef struct SqccRate {
  double modulation_variance;
  double displacement;
  double snr;
  double bit_error_rate;
  double delta;
  double a_d;
  double b_d;
  double c_d;
  double delta_v;
  // Renormalised covariance entries.
  double a;
  double b;
  double c;
  double mutual_information;
  double holevo;
  double rate;
  bool feasible;
} SqccRate;

typedef struct SqccFiniteRate {
  struct SqccRate asymptotic;
  uint64_t block_size;
  double delta_aep;
  double delta_ent;
  double delta_smooth;
  double delta_hash;
  double sigma_a_max;
  double sigma_b_max;
  double sigma_c_min;
  double holevo_pe;
  double rate_pe;
  double rate;
  double key_length;
  double epsilon_total;
} SqccFiniteRate;

typedef struct SqccOptimum {
  // Maximising variance when the best rate is positive, else NaN.
  double v_star;
  // Best rate floored at 0.
  double k_star;
  // Maximising variance and raw best rate, NaN without any feasible point.
  double v_best;
  double k_best;
  uint64_t evaluations;
} SqccOptimum;

typedef struct SqccShot {
  double alice_q;
  double alice_p;
  double bob_q;
  double bob_p;
  // QPSK symbol indices 1-4.
  uint8_t true_symbol;
  uint8_t decided_symbol;
} SqccShot;

typedef struct SqccMoments {
  uint64_t n_shots;
  double a;
  double b;
  double c;
  double a_se;
  double b_se;
  double c_se;
  double bit_error_rate;
  double bit_error_rate_se;
  double symbol_error_rate;
} SqccMoments;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *sqcc_version(void);

// Message for the last failed call on this thread (empty after success).
const char *sqcc_last_error_message(void);

// New scenario with reconciliation efficiency 0.95, B-preserving
// renormalisation, no phase noise and default finite-size parameters.
enum SqccStatus sqcc_scenario_new(double transmissivity,
                                  double excess_noise,
                                  struct SqccScenario **out);

// Releases a scenario. Null is ignored.
void sqcc_scenario_free(struct SqccScenario *scenario);

enum SqccStatus sqcc_scenario_set_phase_noise(struct SqccScenario *scenario, double phase_noise);

enum SqccStatus sqcc_scenario_set_reconciliation_efficiency(struct SqccScenario *scenario,
                                                            double beta);

enum SqccStatus sqcc_scenario_set_strategy(struct SqccScenario *scenario,
                                           enum SqccStrategy strategy);

// Count the mutual information once per quadrature.
enum SqccStatus sqcc_scenario_set_mi_double(struct SqccScenario *scenario, bool enabled);

enum SqccStatus sqcc_scenario_set_block_size(struct SqccScenario *scenario, uint64_t block_size);

// Frame success probability, discretisation bits and one failure
// probability applied to every security term.
enum SqccStatus sqcc_scenario_set_security(struct SqccScenario *scenario,
                                           double frame_success,
                                           uint32_t discretisation_bits,
                                           double epsilon);

// Range and coarse grid size of the modulation-variance search.
enum SqccStatus sqcc_scenario_set_v_search(struct SqccScenario *scenario,
                                           double v_min,
                                           double v_max,
                                           uint32_t grid_points);

// Smallest displacement meeting the per-quadrature bit-error target `qos`.
enum SqccStatus sqcc_required_displacement(const struct SqccScenario *scenario,
                                           double modulation_variance,
                                           double qos,
                                           double *out);

// Asymptotic rate at a fixed variance and displacement.
enum SqccStatus sqcc_asymptotic_rate(const struct SqccScenario *scenario,
                                     double modulation_variance,
                                     double displacement,
                                     struct SqccRate *out);

// Finite-size rate at a fixed variance and displacement, block size from the scenario.
enum SqccStatus sqcc_finite_rate(const struct SqccScenario *scenario,
                                 double modulation_variance,
                                 double displacement,
                                 struct SqccFiniteRate *out);

// Maximise the rate over the modulation variance with the displacement
// tied to `qos`; finite-size when `finite` is true.
enum SqccStatus sqcc_optimise(const struct SqccScenario *scenario,
                              double qos,
                              bool finite,
                              struct SqccOptimum *out);

// Sample `n_shots` joint heterodyne outcomes with uniformly drawn symbols.
enum SqccStatus sqcc_batch_sample(const struct SqccScenario *scenario,
                                  double modulation_variance,
                                  double displacement,
                                  uint64_t n_shots,
                                  uint64_t seed,
                                  struct SqccBatch **out);

// New batch after quadrant decision and re-displacement by the analytic centroid.
enum SqccStatus sqcc_batch_postprocess(const struct SqccBatch *batch, struct SqccBatch **out);

// Number of shots, 0 for null.
uint64_t sqcc_batch_len(const struct SqccBatch *batch);

enum SqccStatus sqcc_batch_shot(const struct SqccBatch *batch,
                                uint64_t index,
                                struct SqccShot *out);

// Second moments folded onto symbol 1, with standard errors.
enum SqccStatus sqcc_batch_moments(const struct SqccBatch *batch, struct SqccMoments *out);

// Releases a batch. Null is ignored.
void sqcc_batch_free(struct SqccBatch *batch);

// Quadrant decision for one outcome, as a symbol index 1-4.
uint8_t sqcc_decide_symbol(double q, double p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQCC_H */
