#include <doctest.h>

#include <random>
#include <set>

#include "augmented.hpp"
#include "fixtures.hpp"

using namespace regret;

TEST_CASE("first index in lexicographic order is zero") {
    AugmentedSpace space(2, 2, 1);
    CHECK(space.index(0, 0, space.window_index({0})) == 0);
    CHECK(space.size() == 2 * 2 * 2);
}

TEST_CASE("k=2 enumeration yields exactly |S|^2 |W|^k distinct indices") {
    AugmentedSpace space(2, 2, 2);
    CHECK(space.size() == 16);
    std::set<std::int64_t> seen;
    for (int s_c = 0; s_c < 2; ++s_c) {
        for (int s_l = 0; s_l < 2; ++s_l) {
            for (int w0 = 0; w0 < 2; ++w0) {
                for (int w1 = 0; w1 < 2; ++w1) {
                    seen.insert(space.index(s_c, s_l, space.window_index({w0, w1})));
                }
            }
        }
    }
    CHECK(seen.size() == 16);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 15);
}

TEST_CASE("decode is the inverse of index on random states") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const int ns = 1 + static_cast<int>(rng() % 5);
        const int nw = 1 + static_cast<int>(rng() % 5);
        const int k = 1 + static_cast<int>(rng() % 3);
        AugmentedSpace space(ns, nw, k);
        AugmentedState x;
        x.s_c = static_cast<int>(rng() % ns);
        x.s_l = static_cast<int>(rng() % ns);
        for (int i = 0; i < k; ++i) x.window.push_back(static_cast<int>(rng() % nw));
        const AugmentedState back = space.decode(space.index(x));
        CHECK(back.s_c == x.s_c);
        CHECK(back.s_l == x.s_l);
        CHECK(back.window == x.window);
    }
}

TEST_CASE("out-of-range components are rejected") {
    AugmentedSpace space(2, 3, 2);
    CHECK_THROWS_AS(space.window_index({0}), ValidationError);
    CHECK_THROWS_AS(space.window_index({0, 3}), ValidationError);
    CHECK_THROWS_AS(space.decode(space.size()), ValidationError);
    CHECK_THROWS_AS(AugmentedSpace(2, 2, 0), ValidationError);
}

TEST_CASE("aligned cost matches hand substitution on matching pennies") {
    const ValidatedSystem sys = validate_system(testing::matching_pennies(0.5));
    AugmentedState x;
    x.s_c = 0;
    x.s_l = 0;
    x.window = {1};
    CHECK(aligned_regret_cost(sys, x, /*a_c=*/1, /*a_l=*/1, /*w=*/1, 1) == 0.5); // 1 - 0.5*1
    CHECK(aligned_regret_cost(sys, x, /*a_c=*/0, /*a_l=*/0, /*w=*/1, 1) == 0.0); // 0 - 0.5*0
}

TEST_CASE("aligned cost is zero for zero rewards") {
    const ValidatedSystem sys =
        validate_system(testing::zero_rewards(testing::matching_pennies(0.9)));
    AugmentedState x;
    x.s_c = 0;
    x.s_l = 0;
    x.window = {0};
    for (int a_c = 0; a_c < 2; ++a_c) {
        for (int a_l = 0; a_l < 2; ++a_l) {
            for (int w = 0; w < 2; ++w) {
                CHECK(aligned_regret_cost(sys, x, a_c, a_l, w, 1) == 0.0);
            }
        }
    }
}

TEST_CASE("transition shifts the window and appends") {
    const ValidatedSystem sys = validate_system([] {
        SystemSpec spec;
        spec.num_states = 1;
        spec.num_actions = 1;
        spec.num_disturbances = 8;
        spec.gamma = 0.9;
        spec.transition.assign(8, 0);
        spec.reward.assign(8, 0.0);
        return spec;
    }());
    AugmentedState x;
    x.s_c = 0;
    x.s_l = 0;
    x.window = {3, 7};
    const AugmentedState next = augmented_transition(sys, x, 0, 0, 5);
    CHECK(next.window == std::vector<int>{7, 5});
    CHECK(next.s_c == 0);
    CHECK(next.s_l == 0);
}

TEST_CASE("transition applies the inventory dynamics to both states") {
    InventoryParams params{10, 10, 10, 1.0, 9.0, 0.995};
    const ValidatedSystem sys = validate_system(build_inventory_system(params));
    AugmentedState x;
    x.s_c = 5;
    x.s_l = 8;
    x.window = {6};
    const AugmentedState next = augmented_transition(sys, x, /*a_c=*/0, /*a_l=*/2, /*w=*/3);
    CHECK(next.s_c == 2);          // (5-3)^+ + 0
    CHECK(next.s_l == 4);          // (8-6)^+ + 2, benchmark consumes the oldest entry
    CHECK(next.window == std::vector<int>{3});
}
