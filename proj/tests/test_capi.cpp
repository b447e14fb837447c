#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "regret.h"

namespace {

const char* kPennies = R"({
  "version": 1,
  "num_states": 1,
  "num_actions": 2,
  "num_disturbances": 2,
  "gamma": 0.5,
  "transition": [[[0, 0], [0, 0]]],
  "reward": [[[1.0, 0.0], [0.0, 1.0]]]
})";

struct Temp {
    std::filesystem::path path;
    explicit Temp(const char* name)
        : path(std::filesystem::temp_directory_path() / name) {}
    ~Temp() { std::filesystem::remove(path); }
    const char* c_str() const { return path.c_str(); }
};

} // namespace

TEST_CASE("system lifecycle through the C interface") {
    rc_system* system = nullptr;
    REQUIRE(rc_system_load_json(kPennies, &system) == RC_OK);
    CHECK(rc_system_num_states(system) == 1);
    CHECK(rc_system_num_actions(system) == 2);
    CHECK(rc_system_num_disturbances(system) == 2);
    CHECK(rc_system_gamma(system) == 0.5);
    CHECK(rc_system_r_max(system) == 1.0);

    int next = -1;
    CHECK(rc_system_next_state(system, 0, 1, 1, &next) == RC_OK);
    CHECK(next == 0);
    double reward = 0.0;
    CHECK(rc_system_reward(system, 0, 1, 1, &reward) == RC_OK);
    CHECK(reward == 1.0);
    CHECK(rc_system_reward(system, 0, 2, 0, &reward) == RC_ERROR_INVALID_ARGUMENT);

    char* text = nullptr;
    REQUIRE(rc_system_save_json(system, &text) == RC_OK);
    rc_system* reloaded = nullptr;
    REQUIRE(rc_system_load_json(text, &reloaded) == RC_OK);
    CHECK(rc_system_hash(system) == rc_system_hash(reloaded));
    rc_string_free(text);
    rc_system_free(reloaded);
    rc_system_free(system);
}

TEST_CASE("parse errors carry messages") {
    rc_system* system = nullptr;
    CHECK(rc_system_load_json("{", &system) == RC_ERROR_PARSE);
    CHECK(std::strlen(rc_last_error()) > 0);
    CHECK(rc_system_load_json(nullptr, &system) == RC_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("discounted solve, regret query, artifact round trip") {
    rc_system* system = nullptr;
    REQUIRE(rc_system_load_json(kPennies, &system) == RC_OK);

    rc_solve_options options;
    rc_solve_options_init(&options);
    options.k = 1;
    options.epsilon = 1e-9;
    rc_solution* solution = nullptr;
    REQUIRE(rc_solve_regret(system, &options, &solution) == RC_OK);
    CHECK(rc_solution_converged(solution) == 1);
    CHECK(std::string(rc_solution_kind(solution)) == "regret_discounted");

    double regret_value = 0.0;
    REQUIRE(rc_solution_regret(solution, 0, &regret_value) == RC_OK);
    CHECK(regret_value == doctest::Approx(2.0).epsilon(1e-8));

    Temp artifact("capi_artifact.json");
    REQUIRE(rc_solution_save_file(solution, artifact.c_str()) == RC_OK);
    rc_solution* loaded = nullptr;
    REQUIRE(rc_solution_load_file(system, artifact.c_str(), &loaded) == RC_OK);
    double reloaded_value = 0.0;
    REQUIRE(rc_solution_regret(loaded, 0, &reloaded_value) == RC_OK);
    CHECK(reloaded_value == regret_value);

    rc_solution_free(loaded);
    rc_solution_free(solution);
    rc_system_free(system);
}

TEST_CASE("controller stepping and rollout") {
    rc_system* system = nullptr;
    REQUIRE(rc_system_load_json(kPennies, &system) == RC_OK);
    rc_solution* solution = nullptr;
    REQUIRE(rc_solve_regret_finite(system, 1, 4, 1, &solution) == RC_OK);
    CHECK(std::string(rc_solution_kind(solution)) == "regret_finite");

    double g0 = 0.0;
    REQUIRE(rc_solution_regret(solution, 0, &g0) == RC_OK);
    CHECK(g0 == doctest::Approx(4.0).epsilon(1e-9));

    rc_controller* controller = nullptr;
    REQUIRE(rc_controller_create(solution, 0, &controller) == RC_OK);
    int action = -1;
    for (int t = 0; t < 4; ++t) {
        REQUIRE(rc_controller_act(controller, &action) == RC_OK);
        REQUIRE(rc_controller_observe(controller, t % 2) == RC_OK);
    }
    CHECK(rc_controller_act(controller, &action) == RC_ERROR_HORIZON_EXHAUSTED);
    REQUIRE(rc_controller_reset(controller, 0) == RC_OK);

    const int w[4] = {0, 1, 0, 1};
    double discounted = 0.0, undiscounted = 0.0;
    REQUIRE(rc_rollout(system, controller, 0, w, 4, nullptr, nullptr, nullptr, &discounted,
                       &undiscounted) == RC_OK);
    CHECK(undiscounted >= 0.0);

    rc_controller_free(controller);
    rc_solution_free(solution);
    rc_system_free(system);
}

TEST_CASE("baseline solvers and inventory builder") {
    rc_system* system = nullptr;
    REQUIRE(rc_system_build_inventory(6, 6, 6, 1.0, 9.0, 0.9, &system) == RC_OK);
    CHECK(rc_system_r_max(system) == 54.0); // p * w_max at s = 0

    rc_solution* robust = nullptr;
    REQUIRE(rc_solve_robust(system, 1e-8, &robust) == RC_OK);
    CHECK(std::string(rc_solution_kind(robust)) == "robust");
    double unused = 0.0;
    CHECK(rc_solution_regret(robust, 0, &unused) == RC_ERROR_VALIDATION);

    const double uniform[7] = {1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7};
    rc_solution* mdp = nullptr;
    REQUIRE(rc_solve_mdp(system, uniform, 7, 1e-8, &mdp) == RC_OK);
    CHECK(std::string(rc_solution_kind(mdp)) == "mdp");

    rc_solution_free(mdp);
    rc_solution_free(robust);
    rc_system_free(system);
}

TEST_CASE("samplers are deterministic through the C interface") {
    std::vector<int> a(64), b(64);
    REQUIRE(rc_sample_poisson(4.0, 10, 64, 99, a.data()) == RC_OK);
    REQUIRE(rc_sample_poisson(4.0, 10, 64, 99, b.data()) == RC_OK);
    CHECK(a == b);

    std::vector<int> w(64), regimes(64);
    REQUIRE(rc_sample_hmm(2.0, 8.0, 0.9, 0, 12, 64, 5, w.data(), regimes.data()) == RC_OK);
    for (int v : w) CHECK(v <= 12);
    CHECK(rc_sample_poisson(-1.0, 10, 4, 1, a.data()) == RC_ERROR_VALIDATION);
}

TEST_CASE("gamma override produces a distinct validated system") {
    rc_system* system = nullptr;
    REQUIRE(rc_system_load_json(kPennies, &system) == RC_OK);
    rc_system* overridden = nullptr;
    REQUIRE(rc_system_override_gamma(system, 0.9, &overridden) == RC_OK);
    CHECK(rc_system_gamma(overridden) == 0.9);
    CHECK(rc_system_hash(overridden) != rc_system_hash(system));
    rc_system* bad = nullptr;
    CHECK(rc_system_override_gamma(system, 1.5, &bad) == RC_ERROR_VALIDATION);
    rc_system_free(overridden);
    rc_system_free(system);
}

TEST_CASE("verification driver returns a report") {
    char* report = nullptr;
    const rc_status status = rc_run_verification(
        R"({"max_states": 2, "max_actions": 2, "max_disturbances": 2,
            "systems_per_cell": 1, "contraction_systems": 3, "contraction_pairs": 5,
            "decomposition_systems": 5, "horizon_max": 3})",
        &report);
    REQUIRE(report != nullptr);
    CHECK(status == RC_OK);
    CHECK(std::string(report).find("\"all_passed\": true") != std::string::npos);
    rc_string_free(report);
}
