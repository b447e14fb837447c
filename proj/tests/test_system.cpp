#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "system.hpp"

using namespace regret;

TEST_CASE("degenerate system validates with zero r_max") {
    SystemSpec spec = testing::degenerate(0.9);
    spec.r_max = 123.0; // stale value must be recomputed
    const ValidatedSystem sys = validate_system(spec);
    CHECK(sys->r_max == 0.0);
    CHECK(sys->gamma == 0.9);
}

TEST_CASE("out-of-range transition is rejected with its coordinate") {
    SystemSpec spec;
    spec.num_states = 2;
    spec.num_actions = 1;
    spec.num_disturbances = 1;
    spec.gamma = 0.9;
    spec.transition = {5, 0};
    spec.reward = {0.0, 0.0};
    CHECK_THROWS_WITH_AS(validate_system(spec),
                         doctest::Contains("out-of-range transition at (s=0, a=0, w=0)"),
                         ValidationError);
}

TEST_CASE("table size mismatch and bad gamma are rejected") {
    SystemSpec spec = testing::degenerate();
    spec.reward.clear();
    CHECK_THROWS_AS(validate_system(spec), ValidationError);

    spec = testing::degenerate();
    spec.gamma = 1.0;
    CHECK_THROWS_AS(validate_system(spec), ValidationError);
    spec.gamma = 0.0;
    CHECK_THROWS_AS(validate_system(spec), ValidationError);
}

TEST_CASE("non-finite reward is rejected") {
    SystemSpec spec = testing::degenerate();
    spec.reward[0] = std::nan("");
    CHECK_THROWS_AS(validate_system(spec), ValidationError);
}

TEST_CASE("inventory construction matches the closed forms") {
    InventoryParams params;
    params.s_max = 10;
    params.a_max = 10;
    params.w_max = 10;
    params.holding_cost = 1.0;
    params.penalty = 9.0;
    params.gamma = 0.995;
    const SystemSpec spec = build_inventory_system(params);
    CHECK(spec.gamma == 0.995);

    // h (s-w)^+ = 2 held units; next stock (5-3)+0 = 2.
    CHECK(spec.reward_at(5, 0, 3) == -2.0);
    CHECK(spec.next_state(5, 0, 3) == 2);
    // p (w-s)^+ = 9*3 = 27 lost sales; next stock 0 + 4.
    CHECK(spec.reward_at(2, 4, 5) == -27.0);
    CHECK(spec.next_state(2, 4, 5) == 4);

    // The attained |reward| maximum over the whole table, by direct scan.
    double scanned = 0.0;
    for (double r : spec.reward) scanned = std::max(scanned, std::abs(r));
    CHECK(scanned == 90.0);
    CHECK(validate_system(spec)->r_max == 90.0);
}

TEST_CASE("inventory invariants hold for random parameters") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        InventoryParams params;
        params.s_max = 1 + static_cast<int>(rng() % 8);
        params.a_max = static_cast<int>(rng() % 8);
        params.w_max = static_cast<int>(rng() % 8);
        params.holding_cost = 0.25 + static_cast<double>(rng() % 8);
        params.penalty = 0.25 + static_cast<double>(rng() % 16);
        params.gamma = 0.5 + 0.049 * static_cast<double>(rng() % 10);
        const SystemSpec spec = build_inventory_system(params);
        const ValidatedSystem sys = validate_system(spec); // must not throw

        for (int s = 0; s <= params.s_max; ++s) {
            for (int w = 0; w <= params.w_max; ++w) {
                for (int a = 0; a <= params.a_max; ++a) {
                    const double r = sys->reward_at(s, a, w);
                    CHECK(r <= 0.0);
                    CHECK((r == 0.0) == (s == w));
                    if (a > 0) {
                        CHECK(sys->next_state(s, a, w) >= sys->next_state(s, a - 1, w));
                    }
                }
            }
        }
    }
}

TEST_CASE("serialization round trip is the identity") {
    SUBCASE("degenerate") {
        const SystemSpec spec = testing::degenerate();
        const SystemSpec back = load_system(save_system(spec));
        CHECK(back.transition == spec.transition);
        CHECK(back.reward == spec.reward);
        CHECK(back.gamma == spec.gamma);
    }
    SUBCASE("inventory with awkward doubles") {
        InventoryParams params{7, 5, 6, 1.0 / 3.0, 9.000000001, 0.9950000001};
        const SystemSpec spec = build_inventory_system(params);
        const SystemSpec back = load_system(save_system(spec));
        CHECK(back.transition == spec.transition);
        CHECK(back.reward == spec.reward); // bit-exact
        CHECK(back.gamma == spec.gamma);
        CHECK(save_system(back) == save_system(spec));
    }
    SUBCASE("labels survive") {
        SystemSpec spec = testing::matching_pennies(0.5);
        spec.labels.actions = {"heads", "tails"};
        const SystemSpec back = load_system(save_system(spec));
        CHECK(back.labels.actions == spec.labels.actions);
    }
}

TEST_CASE("missing reward table names the field") {
    std::string text = save_system(testing::degenerate());
    const auto pos = text.find("\"reward\"");
    REQUIRE(pos != std::string::npos);
    text = text.substr(0, pos) + "\"reward_gone\"" + text.substr(pos + 8);
    CHECK_THROWS_WITH_AS(load_system(text), doctest::Contains("reward"), ParseError);
}

TEST_CASE("schema version mismatch is rejected") {
    std::string text = save_system(testing::degenerate());
    const auto pos = text.find("\"version\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "\"version\": 2");
    CHECK_THROWS_AS(load_system(text), ParseError);
}

TEST_CASE("system hash changes with the tables") {
    const SystemSpec a = testing::matching_pennies(0.5);
    SystemSpec b = a;
    b.reward[0] = 2.0;
    CHECK(system_hash(a) == system_hash(a));
    CHECK(system_hash(a) != system_hash(b));
}
