#include "finite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stage_kernel.hpp"

namespace regret {

namespace {

void check_config(const ValidatedSystem& sys, const FiniteSolverConfig& config) {
    if (config.k < 1) throw ValidationError("k must be >= 1");
    if (config.horizon <= config.k) {
        throw ValidationError("horizon T = " + std::to_string(config.horizon) +
                              " must exceed the lookahead k = " + std::to_string(config.k));
    }
    (void)sys;
}

std::vector<double> embed_tail(const AugmentedSpace& space, const TailTable& tail) {
    // J_T depends only on (s_l, window), never on s_c.
    const int S = space.num_states();
    const std::int64_t Wk = space.window_count();
    std::vector<double> terminal(static_cast<std::size_t>(space.size()));
    for (int s_c = 0; s_c < S; ++s_c) {
        for (int s_l = 0; s_l < S; ++s_l) {
            const double* src = tail.values.data() + static_cast<std::int64_t>(s_l) * Wk;
            double* dst = terminal.data() + space.index(s_c, s_l, 0);
            std::copy(src, src + Wk, dst);
        }
    }
    return terminal;
}

std::vector<double> prefix_level_down(const SystemSpec& spec, const std::vector<double>& next,
                                      std::int64_t level_windows, std::vector<int>* selectors) {
    const int S = spec.num_states;
    const int A = spec.num_actions;
    const int W = spec.num_disturbances;
    std::vector<double> cur(static_cast<std::size_t>(S) * level_windows);
    if (selectors) selectors->resize(cur.size());
    for (int s = 0; s < S; ++s) {
        for (std::int64_t p = 0; p < level_windows; ++p) {
            double best = std::numeric_limits<double>::infinity();
            int best_a = -1;
            for (int a = 0; a < A; ++a) {
                double worst = -std::numeric_limits<double>::infinity();
                for (int w = 0; w < W; ++w) {
                    const int s_next = spec.next_state(s, a, w);
                    const double v = next[s_next * (level_windows * W) + p * W + w] -
                                     spec.reward_at(s, a, w);
                    if (v > worst) worst = v;
                }
                if (worst < best) {
                    best = worst;
                    best_a = a;
                }
            }
            cur[s * level_windows + p] = best;
            if (selectors) (*selectors)[s * level_windows + p] = best_a;
        }
    }
    return cur;
}

} // namespace

TailTable tail_value(const ValidatedSystem& sys, int k) {
    if (k < 1) throw ValidationError("k must be >= 1");
    const SystemSpec& spec = sys.spec();
    AugmentedSpace space(spec.num_states, spec.num_disturbances, k);
    const int S = spec.num_states;
    const int A = spec.num_actions;
    const std::int64_t Wk = space.window_count();
    if (S * Wk > 300'000'000) {
        throw ValidationError("tail table too large: |S| |W|^k = " + std::to_string(S * Wk));
    }

    TailTable tail;
    tail.k = k;
    tail.values.resize(static_cast<std::size_t>(S) * Wk);

    // Plan over the known block: position j consumes window digit j.
    std::vector<double> value(S), next_value(S);
    for (std::int64_t widx = 0; widx < Wk; ++widx) {
        const std::vector<int> window = space.decode_window(widx);
        std::fill(value.begin(), value.end(), 0.0);
        for (int j = k - 1; j >= 0; --j) {
            next_value.swap(value);
            const int w = window[j];
            for (int s = 0; s < S; ++s) {
                double best = -std::numeric_limits<double>::infinity();
                for (int a = 0; a < A; ++a) {
                    const double v =
                        spec.reward_at(s, a, w) + next_value[spec.next_state(s, a, w)];
                    if (v > best) best = v;
                }
                value[s] = best;
            }
        }
        for (int s = 0; s < S; ++s) tail.values[s * Wk + widx] = value[s];
    }
    return tail;
}

FiniteValueStack backward_regret_dp(const ValidatedSystem& sys, const FiniteSolverConfig& config,
                                    const TailTable& tail) {
    check_config(sys, config);
    if (tail.k != config.k) throw ValidationError("tail table was built for a different k");
    detail::StageKernel kernel(sys, config.k, 1.0, 1.0, config.threads);
    const AugmentedSpace& space = kernel.space();
    if (tail.values.size() !=
        static_cast<std::size_t>(space.num_states()) * space.window_count()) {
        throw ValidationError("tail table has wrong length");
    }
    const int stages = config.horizon - config.k; // backward steps T-1 .. k
    const std::int64_t total =
        static_cast<std::int64_t>(stages + 1) * space.size();
    if (total > 300'000'000) {
        throw ValidationError("materialized stage tables would be too large; "
                              "use the value-only solver");
    }

    FiniteValueStack stack;
    stack.k = config.k;
    stack.horizon = config.horizon;
    stack.tail = tail;
    stack.stage_values.resize(stages + 1);
    stack.stage_selectors.resize(stages);
    stack.stage_values[stages] = embed_tail(space, tail);
    for (int t = config.horizon - 1; t >= config.k; --t) {
        const int i = t - config.k;
        stack.stage_selectors[i].resize(static_cast<std::size_t>(space.size()));
        kernel.apply(stack.stage_values[i + 1], stack.stage_values[i],
                     stack.stage_selectors[i].data());
    }
    return stack;
}

FinitePrefix finite_prefix_dp(const ValidatedSystem& sys, const FiniteSolverConfig& config,
                              const FiniteValueStack& stack, int s0) {
    check_config(sys, config);
    const SystemSpec& spec = sys.spec();
    if (s0 < 0 || s0 >= spec.num_states) throw ValidationError("s0 out of range");
    if (stack.k != config.k || stack.horizon != config.horizon || stack.stage_values.empty()) {
        throw ValidationError("stack does not match the solver configuration");
    }
    AugmentedSpace space(spec.num_states, spec.num_disturbances, config.k);
    const int S = spec.num_states;
    const std::int64_t Wk = space.window_count();
    const std::vector<double>& j_k = stack.stage_values[0];

    FinitePrefix out;
    out.k = config.k;
    out.s0 = s0;
    out.values.resize(config.k + 1);
    out.selectors.resize(config.k);

    std::vector<double>& terminal = out.values[config.k];
    terminal.resize(static_cast<std::size_t>(S) * Wk);
    for (int s = 0; s < S; ++s) {
        for (std::int64_t widx = 0; widx < Wk; ++widx) {
            terminal[s * Wk + widx] = j_k[space.index(s, s0, widx)];
        }
    }

    std::int64_t level_windows = Wk / spec.num_disturbances;
    for (int h = config.k - 1; h >= 0; --h) {
        out.values[h] = prefix_level_down(spec, out.values[h + 1], level_windows,
                                          &out.selectors[h]);
        level_windows /= spec.num_disturbances;
    }
    out.regret = out.values[0][s0];
    return out;
}

FiniteSolution solve_regret_finite(std::shared_ptr<const ValidatedSystem> system,
                                   const FiniteSolverConfig& config) {
    if (!system) throw ValidationError("null system");
    FiniteSolution solution;
    solution.system = std::move(system);
    solution.config = config;
    solution.stack = backward_regret_dp(*solution.system, config, tail_value(*solution.system, config.k));
    return solution;
}

double finite_regret_value(const ValidatedSystem& sys, const FiniteSolverConfig& config, int s0) {
    check_config(sys, config);
    const SystemSpec& spec = sys.spec();
    if (s0 < 0 || s0 >= spec.num_states) throw ValidationError("s0 out of range");
    detail::StageKernel kernel(sys, config.k, 1.0, 1.0, config.threads);
    const AugmentedSpace& space = kernel.space();

    std::vector<double> next = embed_tail(space, tail_value(sys, config.k));
    std::vector<double> cur(next.size());
    for (int t = config.horizon - 1; t >= config.k; --t) {
        kernel.apply(next, cur, nullptr);
        cur.swap(next);
    }
    // next now holds J_k.
    const std::int64_t Wk = space.window_count();
    std::vector<double> level(static_cast<std::size_t>(spec.num_states) * Wk);
    for (int s = 0; s < spec.num_states; ++s) {
        for (std::int64_t widx = 0; widx < Wk; ++widx) {
            level[s * Wk + widx] = next[space.index(s, s0, widx)];
        }
    }
    std::int64_t level_windows = Wk / spec.num_disturbances;
    for (int h = config.k - 1; h >= 0; --h) {
        level = prefix_level_down(spec, level, level_windows, nullptr);
        level_windows /= spec.num_disturbances;
    }
    return level[s0];
}

} // namespace regret
