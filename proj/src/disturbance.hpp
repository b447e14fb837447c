#pragma once

#include <cstdint>
#include <vector>

#include "system.hpp"

namespace regret {

/// i.i.d. Poisson demand, clamped into {0..w_max} (mass above the cap
/// collapses onto w_max, so the support equals the model's W exactly).
struct PoissonModel {
    double lambda = 0.0;
    int w_max = 0;
};

enum class Regime : int { low = 0, high = 1 };

/// Two-regime demand: a persistent two-state Markov chain selects the rate
/// and the emission is a clamped Poisson draw with that rate.
struct HmmModel {
    double lambda_low = 0.0;
    double lambda_high = 0.0;
    double persistence = 0.0; // probability of staying in the current regime
    Regime initial_regime = Regime::low;
    int w_max = 0;
};

/**
 * Sampling uses std::mt19937_64, whose integer semantics are pinned by the
 * C++ standard, and explicit inversion of the clamped pmf, so identical
 * (model, n, seed) produce bitwise-identical sequences on any platform.
 */
std::vector<int> sample_iid(const PoissonModel& model, int n, std::uint64_t seed);

struct HmmSample {
    std::vector<int> w;
    std::vector<int> regime; // 0 = low, 1 = high; diagnostics only
};

/// The regime chain and the emissions draw from two independent substreams
/// of the seed, so persistence = 1 (or equal rates) reproduces sample_iid
/// with the same seed bit-for-bit.
HmmSample sample_hmm(const HmmModel& model, int n, std::uint64_t seed);

/// pmf of the clamped Poisson over {0..w_max}: the cap entry absorbs the
/// tail mass. This is also the design distribution handed to the MDP
/// baseline.
std::vector<double> truncated_poisson_pmf(double lambda, int w_max);

/// Mean of the clamped distribution, by direct summation of the pmf.
double truncated_poisson_mean(double lambda, int w_max);

} // namespace regret
