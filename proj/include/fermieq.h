/* C interface to the free-fermion equilibration library.
 *
 * All functions that can fail return feq_status; on failure the out
 * parameters are untouched and feq_last_error() describes the problem.
 * Handles are created/destroyed in pairs; a state keeps its own copy of the
 * configuration, so the feq_config may be destroyed first.
 */
#ifndef FERMIEQ_H
#define FERMIEQ_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    FEQ_OK = 0,
    FEQ_ERR_CONFIG = 2,   /* invalid parameters or config file */
    FEQ_ERR_CAPACITY = 3, /* exact engine sector too large */
    FEQ_ERR_BOUND = 4,    /* proved inequality violated in hypothesis */
    FEQ_ERR_INTERNAL = 5
} feq_status;

typedef struct feq_config feq_config; /* lattice plus derived quantities */
typedef struct feq_state feq_state;   /* many-body state bound to one engine */

/* message for the most recent failure on this thread; never NULL */
const char* feq_last_error(void);

feq_status feq_config_create(int d, long L, long l, double rho_bar, double epsilon,
                             feq_config** out);
void feq_config_destroy(feq_config* cfg);

long feq_config_sites(const feq_config* cfg);          /* V = L^d */
long feq_config_particles(const feq_config* cfg);      /* N */
long feq_config_boxes_per_side(const feq_config* cfg); /* n = ceil(L/l) */
long feq_config_num_centers(const feq_config* cfg);    /* n^d */
/* canonical coordinates of box center center_id; coords_out holds d longs */
feq_status feq_center_coords(const feq_config* cfg, long center_id, long* coords_out);

/* engine: "slater" (orbital evolution, Wick correlators) or "fock" (exact
 * amplitudes, capacity capped). state_spec: "concentrated",
 * "uniform_product", "momentum_filled", "random_slater(seed)", or for the
 * fock engine also "random_fock(seed)". */
feq_status feq_state_create(const feq_config* cfg, const char* engine, const char* state_spec,
                            uint64_t seed, feq_state** out);
void feq_state_destroy(feq_state* state);

/* box observables at time t */
feq_status feq_density(const feq_state* state, long center_id, double t, double* out);
feq_status feq_delta_rho_sq(const feq_state* state, long center_id, double t, double* out);

/* nonequilibrium measure at time t: the exact projector expectation on the
 * fock engine (*is_surrogate = 0), the Chebyshev variance surrogate on the
 * slater engine (*is_surrogate = 1, upper-bounds the exact value) */
feq_status feq_neq_measure(const feq_state* state, double t, double* out, int* is_surrogate);

/* sinc^2-kernel time average of the squared density deviation in box
 * center_id, via the exact tent-kernel spectral sum; m_cut = 0 picks the
 * default momentum cutoff */
feq_status feq_time_average_variance(const feq_state* state, long center_id, double tau,
                                     long m_cut, double* value, double* truncation_bound);

/* fraction of times in [-tau, tau] (grid step dt) where the nonequilibrium
 * measure exceeds delta */
feq_status feq_noneq_fraction(const feq_state* state, double tau, double delta, double dt,
                              double* out);

/* level-count integral J_m; m holds d momentum components, not all zero */
feq_status feq_jm_exact(const feq_config* cfg, const long* m, double tau, double* out);
/* d = 1 closed-form upper bound L^2 log(|C_m| tau)/(|C_m| tau) + 4L */
feq_status feq_jm_log_bound(long m, double tau, long L, double* out);

/* operator-norm chain constant S and the threshold ratio S/(n^d delta_1/2);
 * delta_half and ratio are 0 when tau <= L */
feq_status feq_chain(const feq_config* cfg, double tau, long m_cut, double* S,
                     double* delta_half, double* ratio);

/* tent(omega, tau) = max(0, 1 - tau |omega| / 2) */
double feq_tent(double omega, double tau);
/* delta_a(tau, L) threshold; requires tau > L */
feq_status feq_delta_threshold(double a, double tau, long L, int d, double* out);

/* Config-file driven entry point mirroring the CLI subcommands
 * (simulate | spectral | verify | sweep). config_path and overrides may be
 * NULL; overrides is a semicolon-separated "key=value;key=value" list applied
 * after the file. Returns the process exit code: 0 success, 2 config error,
 * 3 capacity exceeded, 4 in-hypothesis bound violation. */
int feq_run_file(const char* mode, const char* config_path, const char* out_dir,
                 const char* overrides);

#ifdef __cplusplus
}
#endif

#endif
