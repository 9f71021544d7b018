#ifndef SBCIM_H
#define SBCIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SbcimStatus {
  SBCIM_STATUS_OK = 0,
  SBCIM_STATUS_NULL_POINTER = 1,
  SBCIM_STATUS_INVALID_ARGUMENT = 2,
  SBCIM_STATUS_DIMENSION_MISMATCH = 3,
  SBCIM_STATUS_VALIDATION = 4,
  SBCIM_STATUS_PARSE = 5,
  SBCIM_STATUS_TOO_LARGE = 6,
  SBCIM_STATUS_MISSING_DENOMINATOR = 7,
  SBCIM_STATUS_IO = 8,
  SBCIM_STATUS_CONFIG = 9,
  SBCIM_STATUS_OUT_OF_RANGE = 10,
  SBCIM_STATUS_PANIC = 11,
} SbcimStatus;

/**
 * A MAXCUT problem instance.
 */
typedef struct SbcimInstance SbcimInstance;

/**
 * A configured solver (engine, gains, noise and hardware blocks).
 */
typedef struct SbcimSolver SbcimSolver;

/**
 * The results of a batch of trials, in trial order.
 */
typedef struct SbcimTrials SbcimTrials;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on this thread.
 */
const char *sbcim_last_error(void);

/**
 * Random binary instance with each edge present with probability `density`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SbcimStatus sbcim_instance_random(size_t n,
                                       double density,
                                       uint64_t seed,
                                       struct SbcimInstance **out);

/**
 * Instance from `edge_count` node pairs stored as `edges[2k], edges[2k+1]`.
 *
 * # Safety
 * `edges` must point to `2 * edge_count` values and `out` must be valid.
 */
enum SbcimStatus sbcim_instance_from_edges(size_t n,
                                           const uint32_t *edges,
                                           size_t edge_count,
                                           struct SbcimInstance **out);

/**
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum SbcimStatus sbcim_instance_load(const char *path, struct SbcimInstance **out);

/**
 * # Safety
 * `inst` must come from this library and `path` be nul-terminated.
 */
enum SbcimStatus sbcim_instance_save(const struct SbcimInstance *inst, const char *path);

/**
 * # Safety
 * `inst` must come from this library or be null.
 */
void sbcim_instance_free(struct SbcimInstance *inst);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `inst` must come from this library or be null.
 */
size_t sbcim_instance_n(const struct SbcimInstance *inst);

/**
 * Number of edges, or 0 for a null handle.
 *
 * # Safety
 * `inst` must come from this library or be null.
 */
size_t sbcim_instance_edge_count(const struct SbcimInstance *inst);

/**
 * Stored best-known cut; `MissingDenominator` when none is recorded.
 *
 * # Safety
 * `inst` must come from this library and `out` be valid.
 */
enum SbcimStatus sbcim_instance_best_known(const struct SbcimInstance *inst, uint64_t *out);

/**
 * Cut size of `spins` (each +1 or -1).
 *
 * # Safety
 * `spins` must point to `len` values and `out` be valid.
 */
enum SbcimStatus sbcim_cut_size(const struct SbcimInstance *inst,
                                const int8_t *spins,
                                size_t len,
                                uint64_t *out);

/**
 * Exhaustive maximum cut. `spins_out` may be null; otherwise it receives
 * a witness of length `n` and `capacity` must be at least `n`.
 *
 * # Safety
 * `spins_out` must hold `capacity` values when non-null; `cut_out` must be valid.
 */
enum SbcimStatus sbcim_ground_state(const struct SbcimInstance *inst,
                                    int8_t *spins_out,
                                    size_t capacity,
                                    uint64_t *cut_out);

/**
 * Solver with the built-in defaults (ideal engine, 20 iterations).
 *
 * # Safety
 * `out` must be valid.
 */
enum SbcimStatus sbcim_solver_new_default(struct SbcimSolver **out);

/**
 * Solver from a TOML configuration document.
 *
 * # Safety
 * `toml` must be nul-terminated and `out` valid.
 */
enum SbcimStatus sbcim_solver_from_config(const char *toml, struct SbcimSolver **out);

/**
 * Solver from a TOML configuration file.
 *
 * # Safety
 * `path` must be nul-terminated and `out` valid.
 */
enum SbcimStatus sbcim_solver_from_config_file(const char *path, struct SbcimSolver **out);

/**
 * Iterations per trial, or 0 for a null handle.
 *
 * # Safety
 * `solver` must come from this library or be null.
 */
size_t sbcim_solver_iterations(const struct SbcimSolver *solver);

/**
 * # Safety
 * `solver` must come from this library or be null.
 */
void sbcim_solver_free(struct SbcimSolver *solver);

/**
 * Run `trials` trials; trial `t` uses a seed split from `base_seed`.
 *
 * # Safety
 * Handles must come from this library and `out` be valid.
 */
enum SbcimStatus sbcim_solver_run(const struct SbcimSolver *solver,
                                  const struct SbcimInstance *inst,
                                  size_t trials,
                                  uint64_t base_seed,
                                  struct SbcimTrials **out);

/**
 * Number of trials, or 0 for a null handle.
 *
 * # Safety
 * `trials` must come from this library or be null.
 */
size_t sbcim_trials_count(const struct SbcimTrials *trials);

/**
 * Best cut of trial `index` and the 0-based iteration where it first occurred.
 *
 * # Safety
 * `trials` must come from this library; output pointers must be valid.
 */
enum SbcimStatus sbcim_trials_best(const struct SbcimTrials *trials,
                                   size_t index,
                                   uint64_t *best_cut,
                                   size_t *best_iteration);

/**
 * Seed of trial `index`.
 *
 * # Safety
 * `trials` must come from this library and `out` be valid.
 */
enum SbcimStatus sbcim_trials_seed(const struct SbcimTrials *trials, size_t index, uint64_t *out);

/**
 * Copy the cut after each iteration of trial `index` into `buf`; `len`
 * receives the trajectory length. With a null `buf` only `len` is written.
 *
 * # Safety
 * `buf` must hold `capacity` values when non-null; `len` must be valid.
 */
enum SbcimStatus sbcim_trials_trajectory(const struct SbcimTrials *trials,
                                         size_t index,
                                         uint64_t *buf,
                                         size_t capacity,
                                         size_t *len);

/**
 * Copy the final spins of trial `index` into `buf` (`capacity >= n`).
 *
 * # Safety
 * `buf` must hold `capacity` values.
 */
enum SbcimStatus sbcim_trials_final_spins(const struct SbcimTrials *trials,
                                          size_t index,
                                          int8_t *buf,
                                          size_t capacity);

/**
 * # Safety
 * `trials` must come from this library or be null.
 */
void sbcim_trials_free(struct SbcimTrials *trials);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SBCIM_H */
