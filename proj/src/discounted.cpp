#include "discounted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stage_kernel.hpp"

namespace regret {

namespace {

double pow_int(double base, int n) {
    double out = 1.0;
    for (int i = 0; i < n; ++i) out *= base;
    return out;
}

void check_config(const SolverConfig& config) {
    if (config.k < 1) throw ValidationError("k must be >= 1");
    if (!(config.epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
    if (config.max_sweeps < 1) throw ValidationError("max_sweeps must be >= 1");
}

SolveResult solve_synchronous(const ValidatedSystem& sys, const SolverConfig& config,
                              detail::StageKernel& kernel) {
    const double gamma = sys->gamma;
    const double threshold = config.epsilon * (1.0 - gamma) / gamma;
    const std::size_t n = static_cast<std::size_t>(kernel.space().size());

    std::vector<double> cur(n, 0.0), next(n), scratch(n);
    std::vector<double>* j = &cur;
    std::vector<double>* jn = &next;
    std::vector<double>* spare = &scratch;

    SolveResult result;
    double residual = kernel.apply(*j, *jn, nullptr);
    ++result.sweeps_used;

    // Once the minimizing/maximizing selections stop changing, the sweep
    // residual decays along a fixed direction d with (roughly) d <- gamma d,
    // and J* sits at J + gamma/(1-gamma) d componentwise. Jumping there costs
    // one sweep to evaluate and is kept only if it measurably helps, so the
    // certified stopping rule is untouched.
    const double jump_scale = gamma / (1.0 - gamma);
    int jump_period = config.accelerate ? 20 : 0;
    int next_jump = 2 * jump_period;

    while (residual > threshold && result.sweeps_used < config.max_sweeps) {
        if (jump_period > 0 && result.sweeps_used >= next_jump &&
            result.sweeps_used + 2 <= config.max_sweeps) {
            for (std::size_t i = 0; i < n; ++i) {
                (*spare)[i] = (*jn)[i] + jump_scale * ((*jn)[i] - (*j)[i]);
            }
            const double jumped_residual = kernel.apply(*spare, *j, nullptr);
            ++result.sweeps_used;
            if (jumped_residual < residual) {
                residual = jumped_residual;
                std::swap(jn, spare); // pre-jump T(J) is the new spare
                std::swap(j, jn);     // (jumped point, its image) become (J, J_next)
                jump_period = std::max(10, jump_period / 2);
            } else {
                std::swap(j, jn); // discard the jump, continue from T(J)
                residual = kernel.apply(*j, *jn, nullptr);
                ++result.sweeps_used;
                jump_period = std::min(640, jump_period * 2);
            }
            next_jump = result.sweeps_used + jump_period;
            continue;
        }
        std::swap(j, jn);
        residual = kernel.apply(*j, *jn, nullptr);
        ++result.sweeps_used;
    }

    result.converged = residual <= threshold;
    result.error_bound = gamma * residual / (1.0 - gamma);
    result.table.k = config.k;
    result.table.gamma = gamma;
    result.table.residual_bound = result.error_bound;
    result.table.values = std::move(*jn);
    return result;
}

SolveResult solve_in_place(const ValidatedSystem& sys, const SolverConfig& config,
                           detail::StageKernel& kernel) {
    const double gamma = sys->gamma;
    const double threshold = config.epsilon * (1.0 - gamma) / gamma;
    const std::int64_t n = kernel.space().size();

    std::vector<double> values(static_cast<std::size_t>(n), 0.0);
    std::vector<double> verified;

    SolveResult result;
    while (result.sweeps_used < config.max_sweeps) {
        double sweep_delta = 0.0;
        for (std::int64_t x = 0; x < n; ++x) {
            const double updated = kernel.evaluate_state(values, x, nullptr);
            sweep_delta = std::max(sweep_delta, std::abs(updated - values[x]));
            values[x] = updated;
        }
        ++result.sweeps_used;
        if (sweep_delta > threshold) continue;

        // In-place updates mix stale and fresh entries, so the certificate
        // comes from a synchronous verification sweep.
        if (result.sweeps_used >= config.max_sweeps) break;
        const double residual = kernel.apply(values, verified, nullptr);
        ++result.sweeps_used;
        values.swap(verified);
        if (residual <= threshold) {
            result.converged = true;
            result.error_bound = gamma * residual / (1.0 - gamma);
            result.table.k = config.k;
            result.table.gamma = gamma;
            result.table.residual_bound = result.error_bound;
            result.table.values = std::move(values);
            return result;
        }
        result.error_bound = gamma * residual / (1.0 - gamma);
    }

    result.converged = false;
    if (result.error_bound == 0.0) {
        result.error_bound = std::numeric_limits<double>::infinity();
    }
    result.table.k = config.k;
    result.table.gamma = gamma;
    result.table.residual_bound = result.error_bound;
    result.table.values = std::move(values);
    return result;
}

} // namespace

BellmanResult apply_regret_bellman(const ValidatedSystem& sys, int k, const ValueTable& j) {
    if (k < 1) throw ValidationError("k must be >= 1");
    for (double v : j.values) {
        if (!std::isfinite(v)) throw ValidationError("value table contains non-finite entries");
    }
    detail::StageKernel kernel(sys, k, pow_int(sys->gamma, k), sys->gamma, 1);
    BellmanResult out;
    out.table.k = k;
    out.table.gamma = sys->gamma;
    out.residual = kernel.apply(j.values, out.table.values, nullptr);
    return out;
}

SolveResult solve_fixed_point(const ValidatedSystem& sys, const SolverConfig& config) {
    check_config(config);
    detail::StageKernel kernel(sys, config.k, pow_int(sys->gamma, config.k), sys->gamma,
                               config.sweep_mode == SweepMode::in_place ? 1 : config.threads);
    if (config.sweep_mode == SweepMode::in_place) {
        return solve_in_place(sys, config, kernel);
    }
    return solve_synchronous(sys, config, kernel);
}

StationaryPolicy extract_stationary_policy(const ValidatedSystem& sys, int k,
                                           const ValueTable& j_star) {
    detail::StageKernel kernel(sys, k, pow_int(sys->gamma, k), sys->gamma, 1);
    if (j_star.values.size() != static_cast<std::size_t>(kernel.space().size())) {
        throw ValidationError("value table has wrong length");
    }
    StationaryPolicy policy;
    policy.k = k;
    policy.actions.resize(j_star.values.size());
    std::vector<double> scratch;
    kernel.apply(j_star.values, scratch, policy.actions.data());
    return policy;
}

PrefixTables prefix_dp(const ValidatedSystem& sys, int k, const ValueTable& j_star, int s0) {
    const SystemSpec& spec = sys.spec();
    if (k < 1) throw ValidationError("k must be >= 1");
    if (j_star.k != k) throw ValidationError("value table was solved for a different k");
    if (s0 < 0 || s0 >= spec.num_states) throw ValidationError("s0 out of range");
    AugmentedSpace space(spec.num_states, spec.num_disturbances, k);
    if (j_star.values.size() != static_cast<std::size_t>(space.size())) {
        throw ValidationError("value table has wrong length");
    }

    const int S = spec.num_states;
    const int A = spec.num_actions;
    const int W = spec.num_disturbances;

    PrefixTables out;
    out.k = k;
    out.s0 = s0;
    out.values.resize(k + 1);
    out.selectors.resize(k);

    // Terminal embedding: the benchmark trails by k steps, so at level k its
    // state is still s0.
    std::vector<double>& terminal = out.values[k];
    terminal.resize(static_cast<std::size_t>(S) * space.window_count());
    for (int s = 0; s < S; ++s) {
        for (std::int64_t widx = 0; widx < space.window_count(); ++widx) {
            terminal[s * space.window_count() + widx] = j_star.values[space.index(s, s0, widx)];
        }
    }

    std::int64_t level_windows = space.window_count() / W; // |W|^t for t = k-1
    for (int t = k - 1; t >= 0; --t) {
        const std::vector<double>& next = out.values[t + 1];
        std::vector<double>& cur = out.values[t];
        std::vector<int>& sel = out.selectors[t];
        cur.resize(static_cast<std::size_t>(S) * level_windows);
        sel.resize(cur.size());
        const double gamma_t = pow_int(spec.gamma, t);
        for (int s = 0; s < S; ++s) {
            for (std::int64_t p = 0; p < level_windows; ++p) {
                double best = std::numeric_limits<double>::infinity();
                int best_a = -1;
                for (int a = 0; a < A; ++a) {
                    double worst = -std::numeric_limits<double>::infinity();
                    for (int w = 0; w < W; ++w) {
                        const int s_next = spec.next_state(s, a, w);
                        const double v = next[s_next * (level_windows * W) + p * W + w] -
                                         gamma_t * spec.reward_at(s, a, w);
                        if (v > worst) worst = v;
                    }
                    if (worst < best) {
                        best = worst;
                        best_a = a;
                    }
                }
                cur[s * level_windows + p] = best;
                sel[s * level_windows + p] = best_a;
            }
        }
        level_windows /= W;
    }

    out.regret = out.values[0][s0];
    return out;
}

DiscountedSolution solve_regret_discounted(std::shared_ptr<const ValidatedSystem> system,
                                           const SolverConfig& config) {
    if (!system) throw ValidationError("null system");
    DiscountedSolution solution;
    solution.system = std::move(system);
    solution.config = config;
    solution.solve = solve_fixed_point(*solution.system, config);
    solution.policy = extract_stationary_policy(*solution.system, config.k, solution.solve.table);
    return solution;
}

} // namespace regret
