#pragma once

#include <memory>
#include <vector>

#include "augmented.hpp"
#include "system.hpp"

namespace regret {

enum class SweepMode { synchronous, in_place };

struct SolverConfig {
    int k = 1;
    double epsilon = 1e-6; // sup-norm distance of the returned table from the fixed point
    int max_sweeps = 200000;
    SweepMode sweep_mode = SweepMode::synchronous;
    bool accelerate = true; // periodic residual-drift extrapolation; certification unchanged
    int threads = 0;        // 0 = hardware concurrency; in-place mode is single-threaded
};

/// Bounded real-valued function over the augmented index space.
struct ValueTable {
    int k = 0;
    double gamma = 0.0;
    double residual_bound = 0.0; // certified bound on ||values - fixed point||_inf
    std::vector<double> values;
};

struct BellmanResult {
    ValueTable table;
    double residual = 0.0; // ||T J - J||_inf
};

/// One synchronous application of the regret Bellman operator
///   (T J)(x) = min_a max_{w, a_l} { rho(x, a, a_l, w) + gamma J(F(x, a, a_l, w)) }.
BellmanResult apply_regret_bellman(const ValidatedSystem& sys, int k, const ValueTable& j);

struct SolveResult {
    ValueTable table;
    int sweeps_used = 0;
    bool converged = false;    // certification reached before max_sweeps
    double error_bound = 0.0;  // gamma/(1-gamma) * last residual
};

/**
 * Value iteration from J = 0 to the fixed point of the regret Bellman
 * operator. Stops when the sweep residual r = ||J_{n+1} - J_n||_inf
 * satisfies r <= epsilon (1-gamma)/gamma, which certifies
 * ||J_{n+1} - J*||_inf <= epsilon by the contraction bound. If max_sweeps
 * runs out first, the best table is returned with converged = false and the
 * residual-based bound.
 */
SolveResult solve_fixed_point(const ValidatedSystem& sys, const SolverConfig& config);

/// Minimizing action per augmented state (ties toward the lowest index).
struct StationaryPolicy {
    int k = 0;
    std::vector<int> actions;
};

StationaryPolicy extract_stationary_policy(const ValidatedSystem& sys, int k,
                                           const ValueTable& j_star);

/**
 * The k-stage prefix recursion terminated by the fixed point: level t maps
 * (state, disturbance prefix w_0^{t-1}) to a value, with
 *   G_k(s, w) = J*((s, s0, w))
 *   G_t(s, p) = min_a max_w { G_{t+1}(f(s,a,w), p#w) - gamma^t r(s,a,w) }.
 * The optimal regret from s0 is G_0(s0). Prefix indices are base-|W| with
 * the oldest disturbance most significant.
 */
struct PrefixTables {
    int k = 0;
    int s0 = 0;
    std::vector<std::vector<double>> values; // level t in 0..k; |S| * |W|^t entries
    std::vector<std::vector<int>> selectors; // level t in 0..k-1
    double regret = 0.0;                     // values[0][s0]
};

PrefixTables prefix_dp(const ValidatedSystem& sys, int k, const ValueTable& j_star, int s0);

/// Solved discounted instance: everything a deployed controller needs.
struct DiscountedSolution {
    std::shared_ptr<const ValidatedSystem> system;
    SolverConfig config;
    SolveResult solve;
    StationaryPolicy policy;
};

DiscountedSolution solve_regret_discounted(std::shared_ptr<const ValidatedSystem> system,
                                           const SolverConfig& config);

} // namespace regret
