#include "controller.hpp"

#include <cmath>
#include <limits>

namespace regret {

namespace {

void check_disturbance(const ValidatedSystem& sys, int w) {
    if (w < 0 || w >= sys->num_disturbances) {
        throw ValidationError("disturbance " + std::to_string(w) + " out of range [0, " +
                              std::to_string(sys->num_disturbances) + ")");
    }
}

} // namespace

int maximizing_benchmark_action(const ValidatedSystem& sys, const AugmentedSpace& space,
                                const std::vector<double>& j_next, double cont, int s_c, int s_l,
                                std::int64_t widx, int a_c, int w) {
    const SystemSpec& spec = sys.spec();
    const int w0 = space.oldest(widx);
    const int s_c_next = spec.next_state(s_c, a_c, w);
    const std::int64_t next_widx = space.shift_append(widx, w);
    double best = -std::numeric_limits<double>::infinity();
    int best_a = 0;
    for (int a_l = 0; a_l < spec.num_actions; ++a_l) {
        const double v =
            spec.reward_at(s_l, a_l, w0) +
            cont * j_next[space.index(s_c_next, spec.next_state(s_l, a_l, w0), next_widx)];
        if (v > best) {
            best = v;
            best_a = a_l;
        }
    }
    return best_a;
}

StatePolicyController::StatePolicyController(std::shared_ptr<const ValidatedSystem> system,
                                             StatePolicy policy, std::string id)
    : system_(std::move(system)), policy_(std::move(policy)), id_(std::move(id)) {
    if (policy_.actions.size() != static_cast<std::size_t>((*system_)->num_states)) {
        throw ValidationError("policy has wrong length");
    }
}

void StatePolicyController::reset(int s0) {
    if (s0 < 0 || s0 >= (*system_)->num_states) throw ValidationError("s0 out of range");
    state_ = s0;
}

int StatePolicyController::act() { return policy_.actions[state_]; }

void StatePolicyController::observe(int w) {
    check_disturbance(*system_, w);
    state_ = (*system_)->next_state(state_, act(), w);
}

RegretController::RegretController(std::shared_ptr<const DiscountedSolution> sol, int s0)
    : solution_(std::move(sol)),
      space_((*solution_->system)->num_states, (*solution_->system)->num_disturbances,
             solution_->config.k) {
    if (solution_->solve.table.values.size() != static_cast<std::size_t>(space_.size()) ||
        solution_->policy.actions.size() != solution_->solve.table.values.size()) {
        throw ValidationError("solution tables have wrong length");
    }
    prefix_ = prefix_dp(*solution_->system, solution_->config.k, solution_->solve.table, s0);
    reset(s0);
}

std::string RegretController::id() const { return "regret-k" + std::to_string(space_.k()); }

void RegretController::reset(int s0) {
    if (s0 < 0 || s0 >= (*solution_->system)->num_states) {
        throw ValidationError("s0 out of range");
    }
    if (prefix_.s0 != s0) {
        prefix_ = prefix_dp(*solution_->system, space_.k(), solution_->solve.table, s0);
    }
    t_ = 0;
    s_c_ = s0;
    s_l_ = s0;
    widx_ = 0;
    prefix_idx_ = 0;
}

int RegretController::act() {
    if (t_ < space_.k()) {
        const auto& sel = prefix_.selectors[t_];
        std::int64_t level_windows = 1;
        for (int i = 0; i < t_; ++i) level_windows *= space_.num_disturbances();
        return sel[s_c_ * level_windows + prefix_idx_];
    }
    return solution_->policy.actions[space_.index(s_c_, s_l_, widx_)];
}

void RegretController::observe(int w) {
    const ValidatedSystem& sys = *solution_->system;
    check_disturbance(sys, w);
    const SystemSpec& spec = sys.spec();
    const int a = act();
    if (t_ < space_.k()) {
        s_c_ = spec.next_state(s_c_, a, w);
        prefix_idx_ = prefix_idx_ * spec.num_disturbances + w;
        if (t_ + 1 == space_.k()) widx_ = prefix_idx_;
    } else {
        const int a_l = maximizing_benchmark_action(sys, space_, solution_->solve.table.values,
                                                    spec.gamma, s_c_, s_l_, widx_, a, w);
        s_l_ = spec.next_state(s_l_, a_l, space_.oldest(widx_));
        s_c_ = spec.next_state(s_c_, a, w);
        widx_ = space_.shift_append(widx_, w);
    }
    ++t_;
}

FiniteRegretController::FiniteRegretController(std::shared_ptr<const FiniteSolution> sol, int s0)
    : solution_(std::move(sol)),
      space_((*solution_->system)->num_states, (*solution_->system)->num_disturbances,
             solution_->config.k) {
    if (solution_->stack.stage_values.empty() ||
        solution_->stack.stage_values.front().size() != static_cast<std::size_t>(space_.size())) {
        throw ValidationError("solution stack has wrong shape");
    }
    prefix_ = finite_prefix_dp(*solution_->system, solution_->config, solution_->stack, s0);
    reset(s0);
}

std::string FiniteRegretController::id() const {
    return "regret-finite-k" + std::to_string(space_.k());
}

void FiniteRegretController::reset(int s0) {
    if (s0 < 0 || s0 >= (*solution_->system)->num_states) {
        throw ValidationError("s0 out of range");
    }
    if (prefix_.s0 != s0) {
        prefix_ = finite_prefix_dp(*solution_->system, solution_->config, solution_->stack, s0);
    }
    t_ = 0;
    s_c_ = s0;
    s_l_ = s0;
    widx_ = 0;
    prefix_idx_ = 0;
}

int FiniteRegretController::act() {
    const int k = space_.k();
    if (t_ >= solution_->config.horizon) {
        throw HorizonError("controller stepped past the horizon T = " +
                           std::to_string(solution_->config.horizon));
    }
    if (t_ < k) {
        const auto& sel = prefix_.selectors[t_];
        std::int64_t level_windows = 1;
        for (int i = 0; i < t_; ++i) level_windows *= space_.num_disturbances();
        return sel[s_c_ * level_windows + prefix_idx_];
    }
    return solution_->stack.stage_selectors[t_ - k][space_.index(s_c_, s_l_, widx_)];
}

void FiniteRegretController::observe(int w) {
    const ValidatedSystem& sys = *solution_->system;
    check_disturbance(sys, w);
    const SystemSpec& spec = sys.spec();
    const int k = space_.k();
    const int a = act();
    if (t_ < k) {
        s_c_ = spec.next_state(s_c_, a, w);
        prefix_idx_ = prefix_idx_ * spec.num_disturbances + w;
        if (t_ + 1 == k) widx_ = prefix_idx_;
    } else {
        const std::vector<double>& j_next = solution_->stack.stage_values[t_ - k + 1];
        const int a_l = maximizing_benchmark_action(sys, space_, j_next, 1.0, s_c_, s_l_, widx_,
                                                    a, w);
        s_l_ = spec.next_state(s_l_, a_l, space_.oldest(widx_));
        s_c_ = spec.next_state(s_c_, a, w);
        widx_ = space_.shift_append(widx_, w);
    }
    ++t_;
}

} // namespace regret
