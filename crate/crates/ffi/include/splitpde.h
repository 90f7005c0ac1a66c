#ifndef SPLITPDE_H
#define SPLITPDE_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Time-stepping scheme selector.
 */
typedef enum SplitpdeScheme {
  SplitpdeScheme_PeacemanRachford = 0,
  SplitpdeScheme_Lie = 1,
} SplitpdeScheme;

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum SplitpdeStatus {
  SplitpdeStatus_Ok = 0,
  SplitpdeStatus_NullPointer = 1,
  SplitpdeStatus_ConfigError = 2,
  SplitpdeStatus_NumericalError = 3,
} SplitpdeStatus;

/**
 * Opaque problem handle: the split operators plus the benchmark initial data.
 */
typedef struct SplitpdeProblem SplitpdeProblem;

/**
 * Opaque two-component state handle.
 */
typedef struct SplitpdeState SplitpdeState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the most recent error message for the calling thread into `buf`
 * (NUL-terminated, truncated to `cap` bytes). Returns the full message
 * length in bytes.
 */
uintptr_t splitpde_last_error_message(char *buf, uintptr_t cap);

/**
 * Creates a Caginalp solidification problem on an `n x n` periodic grid
 * over `(-pi, pi)^2` with latent-heat coupling `ell`.
 */
enum SplitpdeStatus splitpde_problem_caginalp(uint32_t n, double ell, struct SplitpdeProblem **out);

/**
 * Creates a Gray-Scott problem on an `n x n` periodic grid over
 * `(-pi, pi)^2`.
 */
enum SplitpdeStatus splitpde_problem_gray_scott(uint32_t n,
                                                double d1,
                                                double d2,
                                                double l1,
                                                double l2,
                                                struct SplitpdeProblem **out);

void splitpde_problem_free(struct SplitpdeProblem *problem);

/**
 * Grid points per dimension of the problem's grid.
 */
uint32_t splitpde_problem_grid_size(const struct SplitpdeProblem *problem);

/**
 * Fresh copy of the problem's benchmark initial state.
 */
enum SplitpdeStatus splitpde_initial_state(const struct SplitpdeProblem *problem,
                                           struct SplitpdeState **out);

void splitpde_state_free(struct SplitpdeState *state);

enum SplitpdeStatus splitpde_state_clone(const struct SplitpdeState *state,
                                         struct SplitpdeState **out);

/**
 * Copies one component (`0` or `1`) into `buf`, row-major, `len == n*n`.
 */
enum SplitpdeStatus splitpde_state_read(const struct SplitpdeState *state,
                                        uint32_t component,
                                        double *buf,
                                        uintptr_t len);

/**
 * Overwrites one component (`0` or `1`) from `buf`, row-major, `len == n*n`.
 */
enum SplitpdeStatus splitpde_state_write(struct SplitpdeState *state,
                                         uint32_t component,
                                         const double *buf,
                                         uintptr_t len);

/**
 * Advances `state` in place by `n_steps` steps of size `h`. With
 * `enforce_stability` nonzero a violated step-size restriction is an error.
 */
enum SplitpdeStatus splitpde_integrate(const struct SplitpdeProblem *problem,
                                       enum SplitpdeScheme scheme,
                                       double h,
                                       uintptr_t n_steps,
                                       uint8_t enforce_stability,
                                       struct SplitpdeState *state);

/**
 * Error between two states in the problem's model norm.
 */
enum SplitpdeStatus splitpde_error_norm(const struct SplitpdeProblem *problem,
                                        const struct SplitpdeState *a,
                                        const struct SplitpdeState *b,
                                        double *out);

/**
 * Strict 8-neighbor local maxima of one component above `threshold`
 * (periodic wrap), the spot-replication diagnostic.
 */
enum SplitpdeStatus splitpde_count_local_maxima(const struct SplitpdeState *state,
                                                uint32_t component,
                                                double threshold,
                                                uintptr_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SPLITPDE_H */
