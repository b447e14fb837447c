#include "disturbance.hpp"

#include <cmath>
#include <random>

namespace regret {

namespace {

void check_poisson(double lambda, int w_max) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("lambda must be finite and >= 0");
    }
    if (w_max < 0) throw ValidationError("w_max must be >= 0");
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Smallest i with CDF(i) > u, clamped to w_max.
int poisson_inverse(double lambda, int w_max, double u) {
    double pmf = std::exp(-lambda);
    double cdf = pmf;
    int i = 0;
    while (u >= cdf && i < w_max) {
        ++i;
        pmf *= lambda / i;
        cdf += pmf;
    }
    return i;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

std::vector<int> sample_iid(const PoissonModel& model, int n, std::uint64_t seed) {
    check_poisson(model.lambda, model.w_max);
    if (n < 0) throw ValidationError("n must be >= 0");
    std::mt19937_64 rng(seed);
    std::vector<int> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        out[t] = poisson_inverse(model.lambda, model.w_max, uniform01(rng));
    }
    return out;
}

HmmSample sample_hmm(const HmmModel& model, int n, std::uint64_t seed) {
    check_poisson(model.lambda_low, model.w_max);
    check_poisson(model.lambda_high, model.w_max);
    if (!(model.persistence >= 0.0 && model.persistence <= 1.0)) {
        throw ValidationError("persistence must lie in [0, 1]");
    }
    if (n < 0) throw ValidationError("n must be >= 0");

    std::mt19937_64 emission_rng(seed);
    std::mt19937_64 regime_rng(splitmix64(seed ^ 0x68'6d'6d'00ull)); // independent substream

    HmmSample sample;
    sample.w.resize(static_cast<std::size_t>(n));
    sample.regime.resize(static_cast<std::size_t>(n));
    int regime = static_cast<int>(model.initial_regime);
    for (int t = 0; t < n; ++t) {
        if (t > 0 && uniform01(regime_rng) >= model.persistence) regime = 1 - regime;
        const double lambda = regime == 0 ? model.lambda_low : model.lambda_high;
        sample.regime[t] = regime;
        sample.w[t] = poisson_inverse(lambda, model.w_max, uniform01(emission_rng));
    }
    return sample;
}

std::vector<double> truncated_poisson_pmf(double lambda, int w_max) {
    check_poisson(lambda, w_max);
    std::vector<double> pmf(static_cast<std::size_t>(w_max) + 1);
    double p = std::exp(-lambda);
    double below_cap = 0.0;
    for (int i = 0; i < w_max; ++i) {
        pmf[i] = p;
        below_cap += p;
        p *= lambda / (i + 1);
    }
    pmf[w_max] = std::max(0.0, 1.0 - below_cap);
    return pmf;
}

double truncated_poisson_mean(double lambda, int w_max) {
    const std::vector<double> pmf = truncated_poisson_pmf(lambda, w_max);
    double mean = 0.0;
    for (int i = 0; i <= w_max; ++i) mean += i * pmf[i];
    return mean;
}

} // namespace regret
