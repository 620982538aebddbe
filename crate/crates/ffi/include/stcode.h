/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef STCODE_H
#define STCODE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StcStatus {
  STC_STATUS_OK = 0,
  STC_STATUS_NULL_ARGUMENT = 1,
  STC_STATUS_INVALID_UTF8 = 2,
  STC_STATUS_PARSE_ERROR = 3,
  STC_STATUS_VALIDATION_ERROR = 4,
  STC_STATUS_BUDGET_EXCEEDED = 5,
  STC_STATUS_OUT_OF_RANGE = 6,
  STC_STATUS_DIMENSION_MISMATCH = 7,
  STC_STATUS_INVARIANT_VIOLATION = 8,
  STC_STATUS_PANIC = 9,
} StcStatus;

typedef struct StcCircuit StcCircuit;

typedef struct StcOutcomeCode StcOutcomeCode;

typedef struct StcSpacetimeCode StcSpacetimeCode;

/**
 * Monte Carlo counts.
 */
typedef struct StcTrialReport {
  uint64_t trials;
  uint64_t successes;
  uint64_t outcome_failures;
  uint64_t residual_failures;
  uint64_t misses;
} StcTrialReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next library call on the same thread.
 */
const char *stc_last_error_message(void);

/**
 * Static description of a status code.
 */
const char *stc_status_string(enum StcStatus status);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void stc_string_free(char *s);

/**
 * Parses and validates circuit text.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum StcStatus stc_circuit_parse(const char *text, struct StcCircuit **out);

/**
 * # Safety
 * `c` must be null or a handle from this library, not yet freed.
 */
void stc_circuit_free(struct StcCircuit *c);

/**
 * # Safety
 * `c` must be a live handle.
 */
size_t stc_circuit_num_qubits(const struct StcCircuit *c);

/**
 * # Safety
 * `c` must be a live handle.
 */
size_t stc_circuit_depth(const struct StcCircuit *c);

/**
 * # Safety
 * `c` must be a live handle.
 */
size_t stc_circuit_num_measurements(const struct StcCircuit *c);

/**
 * Canonical text of the circuit; free with `stc_string_free`.
 *
 * # Safety
 * `c` must be a live handle.
 */
char *stc_circuit_to_text(const struct StcCircuit *c);

/**
 * Copy of the circuit with measurement signs fixed so every check is linear.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum StcStatus stc_circuit_linearize(const struct StcCircuit *c, struct StcCircuit **out);

/**
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum StcStatus stc_outcome_code_compute(const struct StcCircuit *c, struct StcOutcomeCode **out);

/**
 * # Safety
 * `oc` must be null or a live handle.
 */
void stc_outcome_code_free(struct StcOutcomeCode *oc);

/**
 * # Safety
 * `oc` must be a live handle.
 */
size_t stc_outcome_code_m(const struct StcOutcomeCode *oc);

/**
 * # Safety
 * `oc` must be a live handle.
 */
size_t stc_outcome_code_k(const struct StcOutcomeCode *oc);

/**
 * Number of checks.
 *
 * # Safety
 * `oc` must be a live handle.
 */
size_t stc_outcome_code_r(const struct StcOutcomeCode *oc);

/**
 * Writes check `index` as `m` bytes (0 or 1) and its sign bit.
 *
 * # Safety
 * `oc` must be a live handle; `u` must hold `m` bytes; `b` must be writable.
 */
enum StcStatus stc_outcome_code_check(const struct StcOutcomeCode *oc,
                                      size_t index,
                                      uint8_t *u,
                                      size_t m,
                                      uint8_t *b);

/**
 * Outcome syndrome of `m` outcome bytes into `r` bytes.
 *
 * # Safety
 * `oc` must be a live handle; buffers must hold `m` and `r` bytes.
 */
enum StcStatus stc_outcome_code_syndrome(const struct StcOutcomeCode *oc,
                                         const uint8_t *outcomes,
                                         size_t m,
                                         uint8_t *syndrome,
                                         size_t r);

/**
 * JSON report of checks and output stabilizer group.
 *
 * # Safety
 * `oc` must be a live handle.
 */
char *stc_outcome_code_to_json(const struct StcOutcomeCode *oc);

/**
 * Spacetime code of the linearized circuit.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum StcStatus stc_spacetime_code_build(const struct StcCircuit *c, struct StcSpacetimeCode **out);

/**
 * # Safety
 * `code` must be null or a live handle.
 */
void stc_spacetime_code_free(struct StcSpacetimeCode *code);

/**
 * Number of spacetime qubits `N`.
 *
 * # Safety
 * `code` must be a live handle.
 */
size_t stc_spacetime_code_num_qubits(const struct StcSpacetimeCode *code);

/**
 * Number of logical qubits `K`.
 *
 * # Safety
 * `code` must be a live handle.
 */
size_t stc_spacetime_code_num_logicals(const struct StcSpacetimeCode *code);

/**
 * Number of stabilizer generators.
 *
 * # Safety
 * `code` must be a live handle.
 */
size_t stc_spacetime_code_r(const struct StcSpacetimeCode *code);

/**
 * Text of stabilizer generator `index`, or null if out of range.
 *
 * # Safety
 * `code` must be a live handle.
 */
char *stc_spacetime_code_stabilizer(const struct StcSpacetimeCode *code, size_t index);

/**
 * Syndrome of a fault operator given in text form (`"1.5:X0;2.5:Z1"`).
 *
 * # Safety
 * `code` must be a live handle; `fault` nul-terminated; `syndrome` must hold `r` bytes.
 */
enum StcStatus stc_spacetime_code_syndrome(const struct StcSpacetimeCode *code,
                                           const char *fault,
                                           uint8_t *syndrome,
                                           size_t r);

/**
 * Check matrix in alist format.
 *
 * # Safety
 * `code` must be a live handle.
 */
char *stc_spacetime_code_to_alist(const struct StcSpacetimeCode *code);

/**
 * JSON export of generators and parameters.
 *
 * # Safety
 * `code` must be a live handle.
 */
char *stc_spacetime_code_to_json(const struct StcSpacetimeCode *code);

/**
 * Lookup-decoder Monte Carlo with uniform fault probability `p`.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum StcStatus stc_simulate(const struct StcCircuit *c,
                            double p,
                            size_t max_faults,
                            uint64_t trials,
                            uint64_t seed,
                            struct StcTrialReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STCODE_H */
