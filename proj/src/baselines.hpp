#pragma once

#include <vector>

#include "system.hpp"

namespace regret {

/// Probability vector over the disturbance alphabet.
struct DisturbanceDistribution {
    std::vector<double> p;
};

/// Throws unless p is nonnegative, matches |W| and sums to 1 within 1e-12.
void validate_distribution(const DisturbanceDistribution& dist, int num_disturbances);

/// Memoryless state-feedback policy with its value vector.
struct StatePolicy {
    std::vector<int> actions;
    std::vector<double> values;
    int sweeps_used = 0;
    bool converged = false;
    double error_bound = 0.0;
};

/// Standard discounted value iteration under a disturbance distribution:
///   V(s) = max_a sum_w p(w) [ r(s,a,w) + gamma V(f(s,a,w)) ].
/// Same stopping rule and tie-break conventions as the regret solver.
StatePolicy mdp_value_iteration(const ValidatedSystem& sys, const DisturbanceDistribution& dist,
                                double epsilon, int max_sweeps = 200000);

/// Worst-case value iteration (the adversary minimizes reward):
///   V(s) = max_a min_w [ r(s,a,w) + gamma V(f(s,a,w)) ].
StatePolicy robust_value_iteration(const ValidatedSystem& sys, double epsilon,
                                   int max_sweeps = 200000);

/// Iterative policy evaluation under a distribution, to within epsilon.
std::vector<double> evaluate_state_policy(const ValidatedSystem& sys,
                                          const std::vector<int>& actions,
                                          const DisturbanceDistribution& dist, double epsilon,
                                          int max_sweeps = 200000);

struct PathPlan {
    double value = 0.0;
    std::vector<int> actions;
};

/// Exact optimum of the return on a fully known disturbance sequence, by
/// backward induction over (state, time). Used as an upper-bound diagnostic:
/// no causal policy can beat it on the same path.
PathPlan clairvoyant_path_value(const ValidatedSystem& sys, int s0,
                                const std::vector<int>& w_sequence, bool discounted);

} // namespace regret
