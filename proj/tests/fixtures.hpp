#pragma once

#include <vector>

#include "augmented.hpp"
#include "system.hpp"

namespace regret::testing {

/// Matching pennies: one state, the controller earns 1 iff its action equals
/// the disturbance. The adversary always mismatches a causal controller
/// (worst-case value 0) while a one-step-lookahead benchmark always matches.
inline SystemSpec matching_pennies(double gamma) {
    SystemSpec spec;
    spec.num_states = 1;
    spec.num_actions = 2;
    spec.num_disturbances = 2;
    spec.gamma = gamma;
    spec.transition = {0, 0, 0, 0};
    spec.reward = {1.0, 0.0, 0.0, 1.0}; // r(0, a, w) = [a == w]
    spec.r_max = 1.0;
    return spec;
}

/// Degenerate single-everything system with zero reward.
inline SystemSpec degenerate(double gamma = 0.9) {
    SystemSpec spec;
    spec.num_states = 1;
    spec.num_actions = 1;
    spec.num_disturbances = 1;
    spec.gamma = gamma;
    spec.transition = {0};
    spec.reward = {0.0};
    return spec;
}

/// Zero-reward copy of an arbitrary system.
inline SystemSpec zero_rewards(SystemSpec spec) {
    for (double& r : spec.reward) r = 0.0;
    spec.r_max = 0.0;
    return spec;
}

/// Reference implementation of the stage operator by direct nested loops
/// through the public single-state operations; the production kernel must
/// agree with it.
inline std::vector<double> naive_stage_operator(const ValidatedSystem& sys, int k,
                                                const std::vector<double>& j, double gamma_k,
                                                double cont) {
    const SystemSpec& spec = sys.spec();
    AugmentedSpace space(spec.num_states, spec.num_disturbances, k);
    std::vector<double> out(j.size());
    for (std::int64_t idx = 0; idx < space.size(); ++idx) {
        const AugmentedState x = space.decode(idx);
        double best = 1e300;
        for (int a = 0; a < spec.num_actions; ++a) {
            double worst = -1e300;
            for (int w = 0; w < spec.num_disturbances; ++w) {
                for (int a_l = 0; a_l < spec.num_actions; ++a_l) {
                    const double rho = spec.reward_at(x.s_l, a_l, x.window.front()) -
                                       gamma_k * spec.reward_at(x.s_c, a, w);
                    const AugmentedState next = augmented_transition(sys, x, a, a_l, w);
                    const double v = rho + cont * j[space.index(next)];
                    if (v > worst) worst = v;
                }
            }
            if (worst < best) best = worst;
        }
        out[idx] = best;
    }
    return out;
}

} // namespace regret::testing
