/*
 * C interface to the regret-optimal control solver library.
 *
 * All functions that can fail return an rc_status; RC_OK is 0. On failure a
 * human-readable message is available from rc_last_error() until the next
 * failing call on the same thread. Objects are opaque handles released with
 * their matching *_free function; strings returned through char** outputs
 * are released with rc_string_free.
 */
#ifndef REGRET_H
#define REGRET_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rc_status {
    RC_OK = 0,
    RC_ERROR_INVALID_ARGUMENT = 1,
    RC_ERROR_PARSE = 2,
    RC_ERROR_VALIDATION = 3,
    RC_ERROR_IO = 4,
    RC_ERROR_NOT_CONVERGED = 5,
    RC_ERROR_GUARD_EXCEEDED = 6,
    RC_ERROR_HORIZON_EXHAUSTED = 7,
    RC_ERROR_VERIFY_FAILED = 8,
    RC_ERROR_INTERNAL = 9
} rc_status;

typedef struct rc_system rc_system;
typedef struct rc_solution rc_solution;
typedef struct rc_controller rc_controller;

const char* rc_version(void);
const char* rc_status_name(rc_status status);
const char* rc_last_error(void);
void rc_string_free(char* text);

/* --- Systems ----------------------------------------------------------- */

rc_status rc_system_load_json(const char* text, rc_system** out);
rc_status rc_system_load_file(const char* path, rc_system** out);
rc_status rc_system_save_json(const rc_system* system, char** out);
rc_status rc_system_save_file(const rc_system* system, const char* path);

/* Lost-sales inventory instance over S = {0..s_max}, A = {0..a_max},
 * W = {0..w_max} with holding cost h and lost-sales penalty p. */
rc_status rc_system_build_inventory(int s_max, int a_max, int w_max, double holding_cost,
                                    double penalty, double gamma, rc_system** out);

/* New handle sharing the tables but with a different discount factor. */
rc_status rc_system_override_gamma(const rc_system* system, double gamma, rc_system** out);

void rc_system_free(rc_system* system);

int rc_system_num_states(const rc_system* system);
int rc_system_num_actions(const rc_system* system);
int rc_system_num_disturbances(const rc_system* system);
double rc_system_gamma(const rc_system* system);
double rc_system_r_max(const rc_system* system);
uint64_t rc_system_hash(const rc_system* system);
rc_status rc_system_next_state(const rc_system* system, int s, int a, int w, int* out);
rc_status rc_system_reward(const rc_system* system, int s, int a, int w, double* out);

/* --- Solvers ------------------------------------------------------------ */

typedef struct rc_solve_options {
    int k;          /* lookahead depth, >= 1 */
    double epsilon; /* sup-norm certification target */
    int max_sweeps;
    int in_place;   /* nonzero: single-threaded in-place sweeps */
    int accelerate; /* nonzero: extrapolation between certified sweeps */
    int threads;    /* 0 = hardware concurrency */
} rc_solve_options;

void rc_solve_options_init(rc_solve_options* options);

/* Discounted regret solver. Returns RC_ERROR_NOT_CONVERGED when max_sweeps
 * ran out; a best-effort solution handle is still produced in that case. */
rc_status rc_solve_regret(const rc_system* system, const rc_solve_options* options,
                          rc_solution** out);

rc_status rc_solve_regret_finite(const rc_system* system, int k, int horizon, int threads,
                                 rc_solution** out);

rc_status rc_solve_mdp(const rc_system* system, const double* distribution, int length,
                       double epsilon, rc_solution** out);
rc_status rc_solve_robust(const rc_system* system, double epsilon, rc_solution** out);

void rc_solution_free(rc_solution* solution);

/* Optimal regret from s0 (regret artifacts only). */
rc_status rc_solution_regret(const rc_solution* solution, int s0, double* out);

const char* rc_solution_kind(const rc_solution* solution);
int rc_solution_converged(const rc_solution* solution);
int rc_solution_sweeps(const rc_solution* solution);
double rc_solution_error_bound(const rc_solution* solution);

rc_status rc_solution_save_file(const rc_solution* solution, const char* path);
rc_status rc_solution_load_file(const rc_system* system, const char* path, rc_solution** out);

/* --- Controllers -------------------------------------------------------- */

rc_status rc_controller_create(const rc_solution* solution, int s0, rc_controller** out);
rc_status rc_controller_reset(rc_controller* controller, int s0);
rc_status rc_controller_act(rc_controller* controller, int* action);
rc_status rc_controller_observe(rc_controller* controller, int w);
void rc_controller_free(rc_controller* controller);

/* --- Disturbance generators --------------------------------------------- */

/* n clamped Poisson draws into out[0..n). Identical (model, n, seed) give
 * bitwise-identical sequences on every platform. */
rc_status rc_sample_poisson(double lambda, int w_max, int n, uint64_t seed, int* out);

/* Two-regime sampler; regimes_out may be NULL. initial_high selects the
 * starting regime. */
rc_status rc_sample_hmm(double lambda_low, double lambda_high, double persistence,
                        int initial_high, int w_max, int n, uint64_t seed, int* w_out,
                        int* regimes_out);

/* --- Rollout ------------------------------------------------------------ */

/* Rolls the controller from s0 along w[0..n). Optional per-step outputs
 * (states, actions, rewards) may be NULL. */
rc_status rc_rollout(const rc_system* system, rc_controller* controller, int s0, const int* w,
                     int n, int* states, int* actions, double* rewards, double* discounted,
                     double* undiscounted);

/* --- High-level drivers -------------------------------------------------- */

/* Runs an experiment configuration (JSON text; base_dir resolves a relative
 * system_file) writing records.csv, aggregate.csv and manifest.json under
 * out_dir. RC_ERROR_NOT_CONVERGED reports that at least one controller
 * failed to converge while the others completed. */
rc_status rc_run_experiment(const char* config_json, const char* base_dir, const char* out_dir,
                            char** summary_json_out);

/* Runs the verification suites. options_json may be NULL for defaults;
 * recognized fields: max_states, max_actions, max_disturbances, k_max,
 * horizon_max, systems_per_cell, tolerance, contraction_systems,
 * contraction_pairs, decomposition_systems, decomposition_trials, seed,
 * threads. Returns RC_ERROR_VERIFY_FAILED when a suite fails; the report is
 * produced either way. */
rc_status rc_run_verification(const char* options_json, char** report_json_out);

#ifdef __cplusplus
}
#endif

#endif /* REGRET_H */
