#include <doctest.h>

#include <cmath>

#include "disturbance.hpp"

using namespace regret;

TEST_CASE("lambda zero yields the all-zero sequence") {
    const std::vector<int> w = sample_iid({0.0, 10}, 1000, 7);
    for (int v : w) CHECK(v == 0);
}

TEST_CASE("identical seeds reproduce identical sequences") {
    const PoissonModel model{4.5, 12};
    CHECK(sample_iid(model, 5000, 123) == sample_iid(model, 5000, 123));
    CHECK(sample_iid(model, 5000, 123) != sample_iid(model, 5000, 124));

    const HmmModel hmm{3.0, 9.0, 0.9, Regime::low, 15};
    const HmmSample a = sample_hmm(hmm, 5000, 9);
    const HmmSample b = sample_hmm(hmm, 5000, 9);
    CHECK(a.w == b.w);
    CHECK(a.regime == b.regime);
}

TEST_CASE("samples stay inside the alphabet") {
    const std::vector<int> w = sample_iid({25.0, 8}, 20000, 3);
    for (int v : w) {
        CHECK(v >= 0);
        CHECK(v <= 8);
    }
}

TEST_CASE("sample mean matches the clamped-pmf mean") {
    const PoissonModel model{5.0, 30};
    const int n = 100000;
    const std::vector<int> w = sample_iid(model, n, 2024);
    double mean = 0.0;
    for (int v : w) mean += v;
    mean /= n;
    const double expected = truncated_poisson_mean(5.0, 30);
    CHECK(std::abs(mean - expected) < 0.05);
}

TEST_CASE("clamped pmf is a distribution and the cap absorbs the tail") {
    const std::vector<double> pmf = truncated_poisson_pmf(9.0, 6);
    double sum = 0.0;
    for (double p : pmf) {
        CHECK(p >= 0.0);
        sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // With the rate well above the cap most mass sits on the cap.
    CHECK(pmf[6] > 0.5);
}

TEST_CASE("absorbing regime reproduces the iid sampler bit for bit") {
    const HmmModel hmm{3.5, 11.0, 1.0, Regime::low, 20};
    const HmmSample sample = sample_hmm(hmm, 2000, 88);
    for (int r : sample.regime) CHECK(r == 0);
    CHECK(sample.w == sample_iid({3.5, 20}, 2000, 88));

    const HmmModel high{3.5, 11.0, 1.0, Regime::high, 20};
    const HmmSample sample_high = sample_hmm(high, 2000, 88);
    CHECK(sample_high.w == sample_iid({11.0, 20}, 2000, 88));
}

TEST_CASE("equal rates reproduce the iid sampler regardless of the chain") {
    const HmmModel hmm{6.0, 6.0, 0.3, Regime::high, 18};
    CHECK(sample_hmm(hmm, 3000, 5).w == sample_iid({6.0, 18}, 3000, 5));
}

TEST_CASE("empirical stay frequency and occupancy at persistence 0.9") {
    const HmmModel hmm{4.0, 7.0, 0.9, Regime::low, 25};
    const int n = 100000;
    const HmmSample sample = sample_hmm(hmm, n, 31337);
    int stays = 0;
    int high = 0;
    for (int t = 1; t < n; ++t) {
        if (sample.regime[t] == sample.regime[t - 1]) ++stays;
    }
    for (int r : sample.regime) high += r;
    CHECK(std::abs(double(stays) / (n - 1) - 0.9) < 0.01);
    CHECK(std::abs(double(high) / n - 0.5) < 0.02);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(sample_iid({-1.0, 5}, 10, 1), ValidationError);
    CHECK_THROWS_AS(sample_iid({1.0, -1}, 10, 1), ValidationError);
    CHECK_THROWS_AS(sample_hmm({1.0, 2.0, 1.5, Regime::low, 5}, 10, 1), ValidationError);
    CHECK_THROWS_AS(sample_iid({1.0, 5}, -1, 1), ValidationError);
}
