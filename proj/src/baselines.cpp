#include "baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace regret {

void validate_distribution(const DisturbanceDistribution& dist, int num_disturbances) {
    if (dist.p.size() != static_cast<std::size_t>(num_disturbances)) {
        throw ValidationError("distribution has " + std::to_string(dist.p.size()) +
                              " entries, expected " + std::to_string(num_disturbances));
    }
    double sum = 0.0;
    for (double v : dist.p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ValidationError("distribution entries must be finite and nonnegative");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ValidationError("distribution sums to " + std::to_string(sum) + ", expected 1");
    }
}

namespace {

template <typename StageValue>
StatePolicy state_value_iteration(const ValidatedSystem& sys, double epsilon, int max_sweeps,
                                  StageValue&& stage_value) {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
    if (max_sweeps < 1) throw ValidationError("max_sweeps must be >= 1");
    const SystemSpec& spec = sys.spec();
    const double gamma = spec.gamma;
    const double threshold = epsilon * (1.0 - gamma) / gamma;
    const int S = spec.num_states;
    const int A = spec.num_actions;

    StatePolicy out;
    out.actions.assign(S, 0);
    out.values.assign(S, 0.0);
    std::vector<double> next(S);
    double residual = std::numeric_limits<double>::infinity();
    while (out.sweeps_used < max_sweeps) {
        residual = 0.0;
        for (int s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            int best_a = 0;
            for (int a = 0; a < A; ++a) {
                const double v = stage_value(out.values, s, a);
                if (v > best) {
                    best = v;
                    best_a = a;
                }
            }
            next[s] = best;
            out.actions[s] = best_a;
            residual = std::max(residual, std::abs(best - out.values[s]));
        }
        out.values.swap(next);
        ++out.sweeps_used;
        if (residual <= threshold) {
            out.converged = true;
            break;
        }
    }
    out.error_bound = gamma * residual / (1.0 - gamma);
    return out;
}

} // namespace

StatePolicy mdp_value_iteration(const ValidatedSystem& sys, const DisturbanceDistribution& dist,
                                double epsilon, int max_sweeps) {
    validate_distribution(dist, sys->num_disturbances);
    const SystemSpec& spec = sys.spec();
    return state_value_iteration(
        sys, epsilon, max_sweeps, [&](const std::vector<double>& values, int s, int a) {
            double acc = 0.0;
            for (int w = 0; w < spec.num_disturbances; ++w) {
                acc += dist.p[w] *
                       (spec.reward_at(s, a, w) + spec.gamma * values[spec.next_state(s, a, w)]);
            }
            return acc;
        });
}

StatePolicy robust_value_iteration(const ValidatedSystem& sys, double epsilon, int max_sweeps) {
    const SystemSpec& spec = sys.spec();
    return state_value_iteration(
        sys, epsilon, max_sweeps, [&](const std::vector<double>& values, int s, int a) {
            double worst = std::numeric_limits<double>::infinity();
            for (int w = 0; w < spec.num_disturbances; ++w) {
                const double v =
                    spec.reward_at(s, a, w) + spec.gamma * values[spec.next_state(s, a, w)];
                if (v < worst) worst = v;
            }
            return worst;
        });
}

std::vector<double> evaluate_state_policy(const ValidatedSystem& sys,
                                          const std::vector<int>& actions,
                                          const DisturbanceDistribution& dist, double epsilon,
                                          int max_sweeps) {
    validate_distribution(dist, sys->num_disturbances);
    const SystemSpec& spec = sys.spec();
    if (actions.size() != static_cast<std::size_t>(spec.num_states)) {
        throw ValidationError("policy has wrong length");
    }
    for (int a : actions) {
        if (a < 0 || a >= spec.num_actions) throw ValidationError("policy action out of range");
    }
    const double gamma = spec.gamma;
    const double threshold = epsilon * (1.0 - gamma) / gamma;
    std::vector<double> values(spec.num_states, 0.0), next(spec.num_states);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double residual = 0.0;
        for (int s = 0; s < spec.num_states; ++s) {
            const int a = actions[s];
            double acc = 0.0;
            for (int w = 0; w < spec.num_disturbances; ++w) {
                acc += dist.p[w] *
                       (spec.reward_at(s, a, w) + gamma * values[spec.next_state(s, a, w)]);
            }
            next[s] = acc;
            residual = std::max(residual, std::abs(acc - values[s]));
        }
        values.swap(next);
        if (residual <= threshold) break;
    }
    return values;
}

PathPlan clairvoyant_path_value(const ValidatedSystem& sys, int s0,
                                const std::vector<int>& w_sequence, bool discounted) {
    const SystemSpec& spec = sys.spec();
    if (w_sequence.empty()) throw ValidationError("disturbance sequence must be nonempty");
    if (s0 < 0 || s0 >= spec.num_states) throw ValidationError("s0 out of range");
    for (int w : w_sequence) {
        if (w < 0 || w >= spec.num_disturbances) {
            throw ValidationError("disturbance out of range");
        }
    }
    const int T = static_cast<int>(w_sequence.size());
    const int S = spec.num_states;
    const double gamma = discounted ? spec.gamma : 1.0;

    // value[t][s] with stage rewards weighted relative to stage t; the
    // recursion carries the relative weight so value[0][s0] is the full sum.
    std::vector<std::vector<double>> value(T + 1, std::vector<double>(S, 0.0));
    std::vector<std::vector<int>> choice(T, std::vector<int>(S, 0));
    for (int t = T - 1; t >= 0; --t) {
        const int w = w_sequence[t];
        for (int s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            int best_a = 0;
            for (int a = 0; a < spec.num_actions; ++a) {
                const double v =
                    spec.reward_at(s, a, w) + gamma * value[t + 1][spec.next_state(s, a, w)];
                if (v > best) {
                    best = v;
                    best_a = a;
                }
            }
            value[t][s] = best;
            choice[t][s] = best_a;
        }
    }

    PathPlan plan;
    plan.value = value[0][s0];
    plan.actions.resize(T);
    int s = s0;
    for (int t = 0; t < T; ++t) {
        plan.actions[t] = choice[t][s];
        s = spec.next_state(s, plan.actions[t], w_sequence[t]);
    }
    return plan;
}

} // namespace regret
