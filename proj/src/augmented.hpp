#pragma once

#include <cstdint>
#include <vector>

#include "system.hpp"

namespace regret {

/// Tracking state for the lookahead-benchmark game: the controller's current
/// state, the benchmark state lagged k steps, and the window of the last k
/// disturbances (oldest first).
struct AugmentedState {
    int s_c = 0;
    int s_l = 0;
    std::vector<int> window;
};

/**
 * Dense index bijection over S x S x W^k.
 *
 * Layout (fixed; solved tables are portable under it): s_c is the outermost
 * digit, then s_l, then the window digits in base |W| with the oldest
 * disturbance most significant:
 *
 *   index(x) = (s_c * |S| + s_l) * |W|^k + sum_i window[i] * |W|^(k-1-i)
 */
class AugmentedSpace {
  public:
    AugmentedSpace(int num_states, int num_disturbances, int k);

    int k() const { return k_; }
    int num_states() const { return num_states_; }
    int num_disturbances() const { return num_disturbances_; }
    std::int64_t window_count() const { return window_count_; }
    std::int64_t size() const { return size_; }

    std::int64_t window_index(const std::vector<int>& window) const;
    std::vector<int> decode_window(std::int64_t widx) const;

    std::int64_t index(int s_c, int s_l, std::int64_t widx) const {
        return (static_cast<std::int64_t>(s_c) * num_states_ + s_l) * window_count_ + widx;
    }
    std::int64_t index(const AugmentedState& x) const {
        return index(x.s_c, x.s_l, window_index(x.window));
    }
    AugmentedState decode(std::int64_t idx) const;

    /// Oldest disturbance in the window (the most significant digit).
    int oldest(std::int64_t widx) const { return static_cast<int>(widx / oldest_stride_); }
    /// Drops the oldest disturbance and appends w.
    std::int64_t shift_append(std::int64_t widx, int w) const {
        return (widx % oldest_stride_) * num_disturbances_ + w;
    }

  private:
    int num_states_;
    int num_disturbances_;
    int k_;
    std::int64_t window_count_;  // |W|^k
    std::int64_t oldest_stride_; // |W|^(k-1)
    std::int64_t size_;          // |S|^2 |W|^k
};

/**
 * Stage cost that aligns the benchmark's reward at the lagged time with the
 * controller's reward now:
 *   rho(x, a_c, a_l, w) = r(s_l, a_l, w0) - gamma^k * r(s_c, a_c, w)
 * where w0 is the oldest window entry. The finite-horizon solver evaluates
 * it with gamma = 1.
 */
double aligned_regret_cost(const ValidatedSystem& sys, const AugmentedState& x, int a_c, int a_l,
                           int w, int k);

/// One step of the tracking-state dynamics: both states advance (the
/// benchmark consumes the oldest window entry) and the window slides.
AugmentedState augmented_transition(const ValidatedSystem& sys, const AugmentedState& x, int a_c,
                                    int a_l, int w);

namespace detail {

/// Range checks shared by the public entry points.
void check_augmented_args(const ValidatedSystem& sys, const AugmentedState& x, int a_c, int a_l,
                          int w, int k);

} // namespace detail

} // namespace regret
