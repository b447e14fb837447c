#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace regret {

namespace {

void check_game_args(const ValidatedSystem& sys, int s0, int k, int T) {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (T <= k) throw ValidationError("horizon T must exceed k");
    if (s0 < 0 || s0 >= sys->num_states) throw ValidationError("s0 out of range");
}

/// Best undiscounted reward sum over the known block starting at s, by
/// enumerating every action sequence in A^len.
double best_block_plan(const SystemSpec& spec, int s, const int* block, int len) {
    std::vector<int> plan(static_cast<std::size_t>(len), 0);
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
        double total = 0.0;
        int state = s;
        for (int j = 0; j < len; ++j) {
            total += spec.reward_at(state, plan[j], block[j]);
            state = spec.next_state(state, plan[j], block[j]);
        }
        if (total > best) best = total;
        int pos = len - 1;
        while (pos >= 0 && ++plan[pos] == spec.num_actions) plan[pos--] = 0;
        if (pos < 0) break;
    }
    return best;
}

struct HistoryGame {
    const SystemSpec& spec;
    int s0;
    int k;
    int T;
    std::vector<int> causal_actions;
    std::vector<int> disturbances;
    std::vector<int> bench_actions; // action at lagged stage t-k, appended at stage t

    double leaf() const {
        double causal_sum = 0.0;
        int s = s0;
        for (int t = 0; t < T; ++t) {
            causal_sum += spec.reward_at(s, causal_actions[t], disturbances[t]);
            s = spec.next_state(s, causal_actions[t], disturbances[t]);
        }
        double bench_sum = 0.0;
        int s_l = s0;
        for (int u = 0; u < T - k; ++u) {
            bench_sum += spec.reward_at(s_l, bench_actions[u], disturbances[u]);
            s_l = spec.next_state(s_l, bench_actions[u], disturbances[u]);
        }
        bench_sum += best_block_plan(spec, s_l, disturbances.data() + (T - k), k);
        return bench_sum - causal_sum;
    }

    double max_node(int t) {
        double worst = -std::numeric_limits<double>::infinity();
        for (int w = 0; w < spec.num_disturbances; ++w) {
            disturbances.push_back(w);
            if (t >= k) {
                for (int a_l = 0; a_l < spec.num_actions; ++a_l) {
                    bench_actions.push_back(a_l);
                    worst = std::max(worst, min_node(t + 1));
                    bench_actions.pop_back();
                }
            } else {
                worst = std::max(worst, min_node(t + 1));
            }
            disturbances.pop_back();
        }
        return worst;
    }

    double min_node(int t) {
        if (t == T) return leaf();
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < spec.num_actions; ++a) {
            causal_actions.push_back(a);
            best = std::min(best, max_node(t));
            causal_actions.pop_back();
        }
        return best;
    }
};

} // namespace

std::int64_t history_tree_leaf_count(const ValidatedSystem& sys, int k, int T) {
    const double A = sys->num_actions;
    const double W = sys->num_disturbances;
    const double leaves = std::pow(A * W, k) * std::pow(A * A * W, T - k);
    if (leaves > 2e18) return std::numeric_limits<std::int64_t>::max();
    return static_cast<std::int64_t>(leaves);
}

double history_tree_regret(const ValidatedSystem& sys, int s0, int k, int T) {
    check_game_args(sys, s0, k, T);
    if (history_tree_leaf_count(sys, k, T) > kEnumerationGuard) {
        throw GuardError("history tree would have more than " +
                         std::to_string(kEnumerationGuard) + " leaves");
    }
    HistoryGame game{sys.spec(), s0, k, T, {}, {}, {}};
    game.causal_actions.reserve(T);
    game.disturbances.reserve(T);
    game.bench_actions.reserve(T - k);
    return game.min_node(0);
}

WorstCaseResult worst_case_realized_regret(const ValidatedSystem& sys, Controller& controller,
                                           int s0, int k, int T) {
    check_game_args(sys, s0, k, T);
    const SystemSpec& spec = sys.spec();
    double paths = 1.0;
    for (int t = 0; t < T; ++t) paths *= spec.num_disturbances;
    if (paths > static_cast<double>(kEnumerationGuard)) {
        throw GuardError("W^T exceeds the enumeration guard");
    }

    FiniteSolverConfig config{k, T, 1};
    const FiniteValueStack stack = backward_regret_dp(sys, config, tail_value(sys, k));
    AugmentedSpace space(spec.num_states, spec.num_disturbances, k);
    const std::int64_t Wk = space.window_count();

    WorstCaseResult result;
    result.value = -std::numeric_limits<double>::infinity();
    std::vector<int> w_seq(static_cast<std::size_t>(T), 0);
    while (true) {
        controller.reset(s0);
        int s_c = s0;
        int s_l = s0;
        std::int64_t widx = 0;
        std::int64_t prefix_idx = 0;
        double causal_sum = 0.0;
        double bench_sum = 0.0;
        for (int t = 0; t < T; ++t) {
            const int a = controller.act();
            const int w = w_seq[t];
            causal_sum += spec.reward_at(s_c, a, w);
            if (t >= k) {
                const int a_l = maximizing_benchmark_action(
                    sys, space, stack.stage_values[t - k + 1], 1.0, s_c, s_l, widx, a, w);
                const int w0 = space.oldest(widx);
                bench_sum += spec.reward_at(s_l, a_l, w0);
                s_l = spec.next_state(s_l, a_l, w0);
                widx = space.shift_append(widx, w);
            } else {
                prefix_idx = prefix_idx * spec.num_disturbances + w;
                if (t + 1 == k) widx = prefix_idx;
            }
            s_c = spec.next_state(s_c, a, w);
            controller.observe(w);
        }
        bench_sum += stack.tail.values[s_l * Wk + widx];
        const double realized = bench_sum - causal_sum;
        if (realized > result.value) {
            result.value = realized;
            result.witness = w_seq;
        }
        int pos = T - 1;
        while (pos >= 0 && ++w_seq[pos] == spec.num_disturbances) w_seq[pos--] = 0;
        if (pos < 0) break;
    }
    return result;
}

DecompositionReport decomposition_check(const ValidatedSystem& sys, int k, int T, int trials,
                                        std::uint64_t seed, double tolerance) {
    check_game_args(sys, 0, k, T);
    if (trials < 0) throw ValidationError("trials must be >= 0");
    const SystemSpec& spec = sys.spec();
    std::mt19937_64 rng(seed);
    auto draw = [&](int bound) { return static_cast<int>(rng() % bound); };

    DecompositionReport report;
    report.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        const int s0 = draw(spec.num_states);
        std::vector<int> w(static_cast<std::size_t>(T)), a_c(w.size()), a_l(w.size());
        for (int t = 0; t < T; ++t) {
            w[t] = draw(spec.num_disturbances);
            a_c[t] = draw(spec.num_actions);
            a_l[t] = draw(spec.num_actions);
        }

        std::vector<double> r_c(w.size()), r_l(w.size());
        int s = s0;
        for (int t = 0; t < T; ++t) {
            r_c[t] = spec.reward_at(s, a_c[t], w[t]);
            s = spec.next_state(s, a_c[t], w[t]);
        }
        s = s0;
        for (int t = 0; t < T; ++t) {
            r_l[t] = spec.reward_at(s, a_l[t], w[t]);
            s = spec.next_state(s, a_l[t], w[t]);
        }

        // Finite-horizon gap identity (gamma = 1).
        double lhs = 0.0;
        for (int t = 0; t < T; ++t) lhs += r_l[t] - r_c[t];
        double rhs = 0.0;
        for (int t = k; t < T; ++t) rhs += r_l[t - k] - r_c[t];
        for (int i = T - k; i < T; ++i) rhs += r_l[i];
        for (int j = 0; j < k; ++j) rhs -= r_c[j];
        const double err_finite = std::abs(lhs - rhs);

        // Discounted gap identity truncated at T; the aligned costs are
        // evaluated through the production augmented-state path.
        const double gamma = spec.gamma;
        double gamma_t = 1.0;
        double lhs_d = 0.0;
        for (int t = 0; t < T; ++t) {
            lhs_d += gamma_t * (r_l[t] - r_c[t]);
            gamma_t *= gamma;
        }
        AugmentedState x;
        x.s_c = s0;
        x.s_l = s0;
        x.window.assign(w.begin(), w.begin() + k);
        {
            int s_c_state = s0;
            for (int t = 0; t < k; ++t) s_c_state = spec.next_state(s_c_state, a_c[t], w[t]);
            x.s_c = s_c_state;
        }
        double rhs_d = 0.0;
        gamma_t = 1.0;
        for (int j = 0; j < k; ++j) {
            rhs_d -= gamma_t * r_c[j];
            gamma_t *= gamma;
        }
        double gamma_rel = 1.0; // gamma^(t-k)
        for (int t = k; t < T; ++t) {
            rhs_d += gamma_rel * aligned_regret_cost(sys, x, a_c[t], a_l[t - k], w[t], k);
            x = augmented_transition(sys, x, a_c[t], a_l[t - k], w[t]);
            gamma_rel *= gamma;
        }
        double gamma_i = std::pow(gamma, T - k);
        for (int i = T - k; i < T; ++i) {
            rhs_d += gamma_i * r_l[i];
            gamma_i *= gamma;
        }
        const double err_discounted = std::abs(lhs_d - rhs_d);

        report.max_error_finite = std::max(report.max_error_finite, err_finite);
        report.max_error_discounted = std::max(report.max_error_discounted, err_discounted);
        if (err_finite > tolerance || err_discounted > tolerance) ++report.violations;
    }
    report.passed = report.violations == 0;
    return report;
}

SystemSpec random_system(int num_states, int num_actions, int num_disturbances, double gamma,
                         std::uint64_t seed) {
    if (num_states < 1 || num_actions < 1 || num_disturbances < 1) {
        throw ValidationError("alphabet sizes must be positive");
    }
    std::mt19937_64 rng(seed);
    SystemSpec spec;
    spec.num_states = num_states;
    spec.num_actions = num_actions;
    spec.num_disturbances = num_disturbances;
    spec.gamma = gamma;
    spec.transition.resize(spec.table_size());
    spec.reward.resize(spec.table_size());
    for (std::size_t i = 0; i < spec.table_size(); ++i) {
        spec.transition[i] = static_cast<int>(rng() % num_states);
        spec.reward[i] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
        spec.r_max = std::max(spec.r_max, std::abs(spec.reward[i]));
    }
    return spec;
}

} // namespace regret
