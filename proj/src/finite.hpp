#pragma once

#include <memory>
#include <vector>

#include "augmented.hpp"
#include "system.hpp"

namespace regret {

struct FiniteSolverConfig {
    int k = 1;
    int horizon = 2; // T; requires 1 <= k < T
    int threads = 0;
};

/// Benchmark value of the last k stages on a fully known disturbance block:
/// Psi(s, w_0^{k-1}) = max over action sequences of the undiscounted reward
/// sum starting from s. Indexed [s][window], window base-|W| oldest first.
struct TailTable {
    int k = 0;
    std::vector<double> values;
};

TailTable tail_value(const ValidatedSystem& sys, int k);

/**
 * Stage tables of the finite-horizon regret recursion (gamma = 1):
 *   J_T(x) = Psi(s_l, window)
 *   J_t(x) = min_a max_{w, a_l} { rho(x, a, a_l, w) + J_{t+1}(F(x, a, a_l, w)) }
 * stage_values[t - k] holds J_t for t = k..T; selectors cover t = k..T-1.
 */
struct FiniteValueStack {
    int k = 0;
    int horizon = 0;
    TailTable tail;
    std::vector<std::vector<double>> stage_values;
    std::vector<std::vector<int>> stage_selectors;
};

FiniteValueStack backward_regret_dp(const ValidatedSystem& sys, const FiniteSolverConfig& config,
                                    const TailTable& tail);

/// Prefix recursion below the tracking horizon:
///   G_k(s, w) = J_k((s, s0, w)),
///   G_h(s, p) = min_a max_w { -r(s, a, w) + G_{h+1}(f(s,a,w), p#w) }.
/// The optimal finite-horizon regret from s0 is G_0(s0).
struct FinitePrefix {
    int k = 0;
    int s0 = 0;
    std::vector<std::vector<double>> values; // h = 0..k
    std::vector<std::vector<int>> selectors; // h = 0..k-1
    double regret = 0.0;
};

FinitePrefix finite_prefix_dp(const ValidatedSystem& sys, const FiniteSolverConfig& config,
                              const FiniteValueStack& stack, int s0);

struct FiniteSolution {
    std::shared_ptr<const ValidatedSystem> system;
    FiniteSolverConfig config;
    FiniteValueStack stack;
};

FiniteSolution solve_regret_finite(std::shared_ptr<const ValidatedSystem> system,
                                   const FiniteSolverConfig& config);

/// Streaming two-buffer variant for value-only queries: computes G_0(s0)
/// without materializing the per-stage tables.
double finite_regret_value(const ValidatedSystem& sys, const FiniteSolverConfig& config, int s0);

} // namespace regret
