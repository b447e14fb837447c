#pragma once

#include <cstdint>
#include <vector>

#include "augmented.hpp"
#include "system.hpp"

namespace regret {
namespace detail {

/**
 * One synchronous application of the min-max stage operator over the
 * tracking state space:
 *
 *   out(x) = min_a max_{w, a_l} [ r(s_l, a_l, w0) - gamma_k r(s_c, a, w)
 *                                 + cont * in(F(x, a, a_l, w)) ]
 *
 * The discounted solver uses gamma_k = gamma^k and cont = gamma; the
 * finite-horizon solver uses gamma_k = cont = 1 with in = the next stage.
 *
 * The inner max factors: the benchmark's reward and successor depend only on
 * (s_l, w0, a_l), so for each (s_l, w0) the distinct benchmark moves are
 * deduplicated by target state and the max over a_l is precomputed into a
 * table indexed by (s_l, w0, s_c', widx'). The remaining min over a and max
 * over w then runs over that table with pruning: an action whose running max
 * already exceeds the incumbent min cannot win (ties keep the lowest index,
 * so only strict excess prunes).
 *
 * apply() is a pure function of `in`; entries of `out` are independent, so
 * the index range is partitioned across threads with disjoint writes.
 */
class StageKernel {
  public:
    StageKernel(const ValidatedSystem& sys, int k, double gamma_k, double cont, int threads);

    const AugmentedSpace& space() const { return space_; }

    /// Computes out = T(in) and returns ||out - in||_inf. If selectors is
    /// non-null it receives the minimizing action per state (ties lowest).
    double apply(const std::vector<double>& in, std::vector<double>& out, int* selectors);

    /// Reference evaluation of a single state by direct nested loops over
    /// (a, w, a_l), reading `values` as the continuation table. Used by the
    /// in-place sweep mode where updates must be visible immediately.
    double evaluate_state(const std::vector<double>& values, std::int64_t x, int* selector) const;

  private:
    void fill_benchmark_table(const std::vector<double>& in);
    void output_range(const std::vector<double>& in, std::vector<double>& out, int* selectors,
                      std::int64_t begin, std::int64_t end, double* residual);

    const SystemSpec& spec_;
    AugmentedSpace space_;
    double gamma_k_;
    double cont_;
    int threads_;

    // Benchmark moves per (s_l, w0), deduplicated by target state.
    std::vector<std::int32_t> move_offset_; // size S*W + 1
    std::vector<std::int32_t> move_target_;
    std::vector<double> move_gain_;

    std::vector<double> transposed_;  // in, re-laid-out as [s_c][widx][s_l]
    std::vector<double> bench_value_; // [s_l][w0][s_c'][widx'] -> max over a_l
    std::vector<std::int32_t> warm_;  // previous argmin per state, evaluated first
};

} // namespace detail
} // namespace regret
