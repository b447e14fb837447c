#pragma once

#include <cstdint>
#include <vector>

#include "controller.hpp"
#include "system.hpp"

namespace regret {

/// Hard cap on exhaustive enumerations (leaves of the game tree or
/// disturbance sequences); exceeding it throws GuardError.
constexpr std::int64_t kEnumerationGuard = 10'000'000;

/// Number of terminal histories of the finite-horizon regret game.
std::int64_t history_tree_leaf_count(const ValidatedSystem& sys, int k, int T);

/**
 * Exact finite-horizon regret game value by depth-first search over full
 * move histories, with no compact state: the controller minimizes at each
 * stage knowing the realized prefix, then the disturbance and the lagged
 * benchmark action maximize jointly. Payoffs are recomputed at each leaf by
 * replaying the raw move lists; the benchmark finishes with the best plan on
 * the final known block, found by enumerating all action sequences.
 *
 * Independent of the stage-table solvers; used to validate them.
 */
double history_tree_regret(const ValidatedSystem& sys, int s0, int k, int T);

struct WorstCaseResult {
    double value = 0.0;
    std::vector<int> witness; // maximizing disturbance sequence
};

/**
 * Exhausts all disturbance sequences in W^T. For each, rolls the controller
 * and a shadow benchmark whose lagged action maximizes against the solved
 * stage tables at the realized disturbance (the same bookkeeping the regret
 * runtime uses); the sequence's realized regret is the shadow benchmark's
 * return (including the best final-block plan) minus the controller's
 * return. Returns the maximum and its witness sequence.
 */
WorstCaseResult worst_case_realized_regret(const ValidatedSystem& sys, Controller& controller,
                                           int s0, int k, int T);

struct DecompositionReport {
    int trials = 0;
    int violations = 0;
    double max_error_finite = 0.0;
    double max_error_discounted = 0.0;
    bool passed = false;
};

/**
 * Checks the algebraic return-gap identities on random (causal actions,
 * benchmark actions, disturbance sequence) triples: the finite-horizon gap
 * equals the aligned-cost sum plus benchmark tail terms minus controller
 * prefix terms, and the discounted gap truncated at T equals the same form
 * with gamma weights and the realized discounted tail. Both must hold to
 * tolerance (the identities are exact in exact arithmetic).
 */
DecompositionReport decomposition_check(const ValidatedSystem& sys, int k, int T, int trials,
                                        std::uint64_t seed, double tolerance = 1e-12);

/// Uniformly random system (transitions uniform over states, rewards uniform
/// in [-1, 1]); deterministic in the seed.
SystemSpec random_system(int num_states, int num_actions, int num_disturbances, double gamma,
                         std::uint64_t seed);

} // namespace regret
