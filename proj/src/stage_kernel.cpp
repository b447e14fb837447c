#include "stage_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace regret {
namespace detail {

namespace {

constexpr std::int64_t kMaxTableEntries = 300'000'000;

int resolve_threads(int requested, std::int64_t work_size) {
    if (work_size < 50'000) return 1;
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

template <typename Fn>
void parallel_ranges(int threads, std::int64_t begin, std::int64_t end, Fn&& fn) {
    if (threads <= 1 || end - begin < 2) {
        fn(begin, end, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::int64_t chunk = (end - begin + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t lo = begin + chunk * t;
        const std::int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi, t] { fn(lo, hi, t); });
    }
    for (auto& th : pool) th.join();
}

} // namespace

StageKernel::StageKernel(const ValidatedSystem& sys, int k, double gamma_k, double cont,
                         int threads)
    : spec_(sys.spec()), space_(spec_.num_states, spec_.num_disturbances, k), gamma_k_(gamma_k),
      cont_(cont) {
    const std::int64_t S = spec_.num_states;
    const std::int64_t W = spec_.num_disturbances;
    const std::int64_t bench_entries = S * W * S * space_.window_count();
    if (space_.size() > kMaxTableEntries || bench_entries > kMaxTableEntries) {
        throw ValidationError("augmented problem too large: |S|^2 |W|^k = " +
                              std::to_string(space_.size()));
    }
    threads_ = resolve_threads(threads, space_.size());

    move_offset_.assign(static_cast<std::size_t>(S * W) + 1, 0);
    move_target_.reserve(static_cast<std::size_t>(S * W));
    move_gain_.reserve(static_cast<std::size_t>(S * W));
    std::vector<int> seen(static_cast<std::size_t>(S), -1);
    for (int s_l = 0; s_l < S; ++s_l) {
        for (int w0 = 0; w0 < W; ++w0) {
            std::fill(seen.begin(), seen.end(), -1);
            for (int a_l = 0; a_l < spec_.num_actions; ++a_l) {
                const int target = spec_.next_state(s_l, a_l, w0);
                const double gain = spec_.reward_at(s_l, a_l, w0);
                if (seen[target] < 0) {
                    seen[target] = static_cast<int>(move_target_.size());
                    move_target_.push_back(target);
                    move_gain_.push_back(gain);
                } else if (gain > move_gain_[seen[target]]) {
                    move_gain_[seen[target]] = gain;
                }
            }
            move_offset_[static_cast<std::size_t>(s_l * W + w0) + 1] =
                static_cast<std::int32_t>(move_target_.size());
        }
    }

    transposed_.resize(static_cast<std::size_t>(space_.size()));
    bench_value_.resize(static_cast<std::size_t>(bench_entries));
    warm_.assign(static_cast<std::size_t>(space_.size()), 0);
}

void StageKernel::fill_benchmark_table(const std::vector<double>& in) {
    const std::int64_t S = spec_.num_states;
    const std::int64_t W = spec_.num_disturbances;
    const std::int64_t Wk = space_.window_count();

    // transposed_[(s_c * Wk + widx) * S + s_l] = in[(s_c * S + s_l) * Wk + widx]
    parallel_ranges(threads_, 0, S, [&](std::int64_t lo, std::int64_t hi, int) {
        for (std::int64_t s_c = lo; s_c < hi; ++s_c) {
            for (std::int64_t s_l = 0; s_l < S; ++s_l) {
                const double* src = in.data() + (s_c * S + s_l) * Wk;
                double* dst = transposed_.data() + s_c * Wk * S + s_l;
                for (std::int64_t widx = 0; widx < Wk; ++widx) dst[widx * S] = src[widx];
            }
        }
    });

    parallel_ranges(threads_, 0, S * W, [&](std::int64_t lo, std::int64_t hi, int) {
        for (std::int64_t slot = lo; slot < hi; ++slot) {
            const std::int32_t mbegin = move_offset_[slot];
            const std::int32_t mend = move_offset_[slot + 1];
            double* dst = bench_value_.data() + slot * S * Wk;
            for (std::int64_t pos = 0; pos < S * Wk; ++pos) {
                const double* base = transposed_.data() + pos * S;
                double best = -std::numeric_limits<double>::infinity();
                for (std::int32_t m = mbegin; m < mend; ++m) {
                    const double v = move_gain_[m] + cont_ * base[move_target_[m]];
                    if (v > best) best = v;
                }
                dst[pos] = best;
            }
        }
    });
}

void StageKernel::output_range(const std::vector<double>& in, std::vector<double>& out,
                               int* selectors, std::int64_t begin, std::int64_t end,
                               double* residual) {
    const std::int64_t S = spec_.num_states;
    const std::int64_t A = spec_.num_actions;
    const std::int64_t W = spec_.num_disturbances;
    const std::int64_t Wk = space_.window_count();
    const std::int64_t tails = Wk / W; // |W|^(k-1); window = w0 * tails + tail
    const double inf = std::numeric_limits<double>::infinity();

    double local_residual = 0.0;
    for (std::int64_t s_c = begin; s_c < end; ++s_c) {
        for (std::int64_t s_l = 0; s_l < S; ++s_l) {
            for (std::int64_t w0 = 0; w0 < W; ++w0) {
                const double* bench = bench_value_.data() + (s_l * W + w0) * S * Wk;
                for (std::int64_t tail = 0; tail < tails; ++tail) {
                    const std::int64_t widx = w0 * tails + tail;
                    const std::int64_t x = (s_c * S + s_l) * Wk + widx;
                    const std::int64_t appended = tail * W;

                    double best = inf;
                    int best_a = -1;
                    const auto consider = [&](int a) {
                        const double* rrow = spec_.reward.data() + (s_c * A + a) * W;
                        const int* trow = spec_.transition.data() + (s_c * A + a) * W;
                        double running = -inf;
                        for (std::int64_t w = 0; w < W; ++w) {
                            const double cand =
                                bench[trow[w] * Wk + appended + w] - gamma_k_ * rrow[w];
                            if (cand > running) {
                                running = cand;
                                if (running > best) return; // cannot win, ties keep lower index
                            }
                        }
                        if (running < best || (running == best && a < best_a)) {
                            best = running;
                            best_a = a;
                        }
                    };
                    // The previous sweep's minimizer usually still wins; trying
                    // it first makes the pruning bound tight from the start.
                    const int warm = warm_[x];
                    consider(warm);
                    for (int a = 0; a < A; ++a) {
                        if (a != warm) consider(a);
                    }
                    out[x] = best;
                    warm_[x] = best_a;
                    if (selectors) selectors[x] = best_a;
                    const double diff = std::abs(best - in[x]);
                    if (diff > local_residual) local_residual = diff;
                }
            }
        }
    }
    *residual = local_residual;
}

double StageKernel::apply(const std::vector<double>& in, std::vector<double>& out,
                          int* selectors) {
    if (in.size() != static_cast<std::size_t>(space_.size())) {
        throw ValidationError("value table has wrong length");
    }
    out.resize(in.size());
    fill_benchmark_table(in);

    const std::int64_t S = spec_.num_states;
    std::vector<double> residuals(static_cast<std::size_t>(threads_), 0.0);
    parallel_ranges(threads_, 0, S, [&](std::int64_t lo, std::int64_t hi, int tid) {
        output_range(in, out, selectors, lo, hi, &residuals[tid]);
    });
    return *std::max_element(residuals.begin(), residuals.end());
}

double StageKernel::evaluate_state(const std::vector<double>& values, std::int64_t x,
                                   int* selector) const {
    const std::int64_t S = spec_.num_states;
    const std::int64_t A = spec_.num_actions;
    const std::int64_t W = spec_.num_disturbances;
    const std::int64_t Wk = space_.window_count();
    const double inf = std::numeric_limits<double>::infinity();

    const std::int64_t widx = x % Wk;
    const std::int64_t pair = x / Wk;
    const std::int64_t s_l = pair % S;
    const std::int64_t s_c = pair / S;
    const int w0 = space_.oldest(widx);
    const std::int32_t mbegin = move_offset_[s_l * W + w0];
    const std::int32_t mend = move_offset_[s_l * W + w0 + 1];

    double best = inf;
    int best_a = -1;
    for (int a = 0; a < A; ++a) {
        const double* rrow = spec_.reward.data() + (s_c * A + a) * W;
        const int* trow = spec_.transition.data() + (s_c * A + a) * W;
        double running = -inf;
        for (std::int64_t w = 0; w < W; ++w) {
            const std::int64_t next_widx = space_.shift_append(widx, static_cast<int>(w));
            const std::int64_t base = (static_cast<std::int64_t>(trow[w]) * S) * Wk + next_widx;
            double inner = -inf;
            for (std::int32_t m = mbegin; m < mend; ++m) {
                const double v =
                    move_gain_[m] + cont_ * values[base + move_target_[m] * Wk];
                if (v > inner) inner = v;
            }
            const double cand = inner - gamma_k_ * rrow[w];
            if (cand > running) running = cand;
        }
        if (running < best) {
            best = running;
            best_a = a;
        }
    }
    if (selector) *selector = best_a;
    return best;
}

} // namespace detail
} // namespace regret
