#include "augmented.hpp"

#include <cmath>
#include <limits>

namespace regret {

AugmentedSpace::AugmentedSpace(int num_states, int num_disturbances, int k)
    : num_states_(num_states), num_disturbances_(num_disturbances), k_(k) {
    if (num_states < 1 || num_disturbances < 1) {
        throw ValidationError("augmented space needs nonempty alphabets");
    }
    if (k < 1) throw ValidationError("lookahead depth k must be >= 1");
    window_count_ = 1;
    for (int i = 0; i < k; ++i) {
        if (window_count_ > std::numeric_limits<std::int64_t>::max() / num_disturbances) {
            throw ValidationError("|W|^k overflows the index range");
        }
        window_count_ *= num_disturbances;
    }
    oldest_stride_ = window_count_ / num_disturbances;
    const std::int64_t ss = static_cast<std::int64_t>(num_states) * num_states;
    if (window_count_ > std::numeric_limits<std::int64_t>::max() / ss) {
        throw ValidationError("|S|^2 |W|^k overflows the index range");
    }
    size_ = ss * window_count_;
}

std::int64_t AugmentedSpace::window_index(const std::vector<int>& window) const {
    if (window.size() != static_cast<std::size_t>(k_)) {
        throw ValidationError("window length " + std::to_string(window.size()) +
                              " does not match k = " + std::to_string(k_));
    }
    std::int64_t widx = 0;
    for (int w : window) {
        if (w < 0 || w >= num_disturbances_) {
            throw ValidationError("window entry " + std::to_string(w) + " out of range");
        }
        widx = widx * num_disturbances_ + w;
    }
    return widx;
}

std::vector<int> AugmentedSpace::decode_window(std::int64_t widx) const {
    std::vector<int> window(k_);
    for (int i = k_ - 1; i >= 0; --i) {
        window[i] = static_cast<int>(widx % num_disturbances_);
        widx /= num_disturbances_;
    }
    return window;
}

AugmentedState AugmentedSpace::decode(std::int64_t idx) const {
    if (idx < 0 || idx >= size_) {
        throw ValidationError("augmented index " + std::to_string(idx) + " out of range");
    }
    AugmentedState x;
    x.window = decode_window(idx % window_count_);
    const std::int64_t pair = idx / window_count_;
    x.s_l = static_cast<int>(pair % num_states_);
    x.s_c = static_cast<int>(pair / num_states_);
    return x;
}

namespace detail {

void check_augmented_args(const ValidatedSystem& sys, const AugmentedState& x, int a_c, int a_l,
                          int w, int k) {
    const SystemSpec& spec = sys.spec();
    if (k < 1) throw ValidationError("k must be >= 1");
    if (x.s_c < 0 || x.s_c >= spec.num_states || x.s_l < 0 || x.s_l >= spec.num_states) {
        throw ValidationError("state component out of range");
    }
    if (x.window.size() != static_cast<std::size_t>(k)) {
        throw ValidationError("window length does not match k");
    }
    for (int wi : x.window) {
        if (wi < 0 || wi >= spec.num_disturbances) {
            throw ValidationError("window entry out of range");
        }
    }
    if (a_c < 0 || a_c >= spec.num_actions || a_l < 0 || a_l >= spec.num_actions) {
        throw ValidationError("action out of range");
    }
    if (w < 0 || w >= spec.num_disturbances) throw ValidationError("disturbance out of range");
}

} // namespace detail

double aligned_regret_cost(const ValidatedSystem& sys, const AugmentedState& x, int a_c, int a_l,
                           int w, int k) {
    detail::check_augmented_args(sys, x, a_c, a_l, w, k);
    const SystemSpec& spec = sys.spec();
    double gamma_k = 1.0;
    for (int i = 0; i < k; ++i) gamma_k *= spec.gamma;
    return spec.reward_at(x.s_l, a_l, x.window.front()) - gamma_k * spec.reward_at(x.s_c, a_c, w);
}

AugmentedState augmented_transition(const ValidatedSystem& sys, const AugmentedState& x, int a_c,
                                    int a_l, int w) {
    detail::check_augmented_args(sys, x, a_c, a_l, w, static_cast<int>(x.window.size()));
    const SystemSpec& spec = sys.spec();
    AugmentedState next;
    next.s_c = spec.next_state(x.s_c, a_c, w);
    next.s_l = spec.next_state(x.s_l, a_l, x.window.front());
    next.window.assign(x.window.begin() + 1, x.window.end());
    next.window.push_back(w);
    return next;
}

} // namespace regret
